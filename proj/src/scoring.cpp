#include "outlier/scoring.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace outlier {

Subset::Subset(std::initializer_list<int> members) {
  for (int i : members) {
    if (i < 0 || i >= 64) throw std::out_of_range("subset index out of range");
    mask_ |= std::uint64_t{1} << i;
  }
}

Subset Subset::of(const std::vector<int>& members) {
  Subset s;
  for (int i : members) {
    if (i < 0 || i >= 64) throw std::out_of_range("subset index out of range");
    s.mask_ |= std::uint64_t{1} << i;
  }
  return s;
}

Subset Subset::range(int begin, int end) {
  Subset s;
  for (int i = begin; i < end; ++i) s.mask_ |= std::uint64_t{1} << i;
  return s;
}

int Subset::size() const { return std::popcount(mask_); }

std::vector<int> Subset::members() const {
  std::vector<int> out;
  for (std::uint64_t m = mask_; m; m &= m - 1) out.push_back(std::countr_zero(m));
  return out;
}

Subset Subset::complement(int M) const {
  const std::uint64_t all = M == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << M) - 1);
  return Subset(all & ~mask_);
}

std::string Subset::to_string() const {
  std::string s = "{";
  bool first = true;
  for (int i : members()) {
    if (!first) s += ",";
    s += std::to_string(i + 1);
    first = false;
  }
  return s + "}";
}

bool lex_less(const Subset& a, const Subset& b) {
  const auto x = a.members(), y = b.members();
  return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
}

int max_outliers(int M) { return M / 2 + (M % 2) - 1; }

namespace {

void combinations(int M, int size, int start, std::uint64_t mask, std::vector<Subset>& out) {
  if (size == 0) {
    out.emplace_back(mask);
    return;
  }
  for (int i = start; i <= M - size; ++i)
    combinations(M, size - 1, i + 1, mask | (std::uint64_t{1} << i), out);
}

void check_m(int M) {
  if (M < 3 || M > 64) throw std::invalid_argument("number of streams must be in [3, 64]");
}

}  // namespace

CandidateSet::CandidateSet(int M, int T, CandidateMode mode) : M_(M), T_(T), mode_(mode) {
  check_m(M);
  if (T < 1 || T > max_outliers(M))
    throw std::invalid_argument("number of outliers must satisfy 0 < T <= ceil(M/2 - 1)");
  if (mode == CandidateMode::exact) {
    combinations(M, T, 0, 0, members_);
  } else {
    for (int s = 1; s <= T; ++s) combinations(M, s, 0, 0, members_);
    std::sort(members_.begin(), members_.end(), lex_less);
  }
}

DistributionTuple::DistributionTuple(std::vector<Distribution> entries) : entries_(std::move(entries)) {
  check_m(static_cast<int>(entries_.size()));
  for (const auto& d : entries_)
    if (d.alphabet_size() != entries_.front().alphabet_size())
      throw std::invalid_argument("tuple entries use different alphabets");
}

DistributionTuple DistributionTuple::plug_in(const Distribution& pn, const Distribution& pa, int M,
                                             const Subset& outliers) {
  std::vector<Distribution> e;
  e.reserve(static_cast<std::size_t>(M));
  for (int i = 0; i < M; ++i) e.push_back(outliers.contains(i) ? pa : pn);
  return DistributionTuple(std::move(e));
}

DivergenceValue group_divergence(const DistributionTuple& tuple, const Subset& group) {
  const auto idx = group.members();
  if (idx.size() <= 1) return DivergenceValue(0.0);
  // Identical members: exact zero rather than mixture rounding.
  if (std::all_of(idx.begin(), idx.end(), [&](int j) { return tuple[j] == tuple[idx.front()]; }))
    return DivergenceValue(0.0);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(tuple.alphabet_size());
  for (int j : idx) mean += tuple[j].probs();
  mean /= static_cast<double>(idx.size());
  double s = 0.0;
  for (int j : idx) s += detail::kl_raw(tuple[j].probs().data(), mean.data(), tuple.alphabet_size());
  return DivergenceValue(s);
}

namespace {

void check_candidate(const DistributionTuple& tuple, const Subset& B) {
  const int M = tuple.M();
  if (B.empty() || !B.is_subset_of(Subset::range(0, M)) || B.size() >= M)
    throw std::out_of_range("candidate set must be a non-empty proper subset of the streams");
}

}  // namespace

DivergenceValue g_i(const DistributionTuple& tuple, int i) {
  if (i < 0 || i >= tuple.M()) throw std::out_of_range("stream index out of range");
  return group_divergence(tuple, Subset{i}.complement(tuple.M()));
}

DivergenceValue g_set(const DistributionTuple& tuple, const Subset& B) {
  check_candidate(tuple, B);
  return group_divergence(tuple, B.complement(tuple.M())) + group_divergence(tuple, B);
}

DivergenceValue g_li_set(const DistributionTuple& tuple, const Subset& B) {
  check_candidate(tuple, B);
  return group_divergence(tuple, B.complement(tuple.M()));
}

ObservationMatrix::ObservationMatrix(int M, int alphabet_size)
    : M_(M), alphabet_size_(alphabet_size), rows_(static_cast<std::size_t>(M)),
      counts_(static_cast<std::size_t>(M) * static_cast<std::size_t>(alphabet_size), 0) {
  if (M < 1 || M > 64) throw std::invalid_argument("number of rows must be in [1, 64]");
  if (alphabet_size < 2) throw std::invalid_argument("alphabet size must be >= 2");
}

ObservationMatrix ObservationMatrix::from_rows(const std::vector<std::vector<Symbol>>& rows,
                                               int alphabet_size) {
  if (rows.empty() || rows.front().empty()) throw std::invalid_argument("empty observation matrix");
  for (const auto& r : rows)
    if (r.size() != rows.front().size()) throw std::invalid_argument("rows differ in length");
  ObservationMatrix obs(static_cast<int>(rows.size()), alphabet_size);
  std::vector<Symbol> col(rows.size());
  for (std::size_t k = 0; k < rows.front().size(); ++k) {
    for (std::size_t i = 0; i < rows.size(); ++i) col[i] = rows[i][k];
    obs.append(col);
  }
  return obs;
}

void ObservationMatrix::append(std::span<const Symbol> column) {
  if (static_cast<int>(column.size()) != M_) throw std::invalid_argument("column has wrong height");
  for (Symbol s : column)
    if (s < 0 || s >= alphabet_size_) throw std::out_of_range("symbol out of range");
  for (int i = 0; i < M_; ++i) {
    rows_[static_cast<std::size_t>(i)].push_back(column[static_cast<std::size_t>(i)]);
    ++counts_[static_cast<std::size_t>(i * alphabet_size_ + column[static_cast<std::size_t>(i)])];
  }
  ++length_;
}

DistributionTuple ObservationMatrix::types() const {
  if (length_ < 1) throw std::logic_error("no observations yet");
  std::vector<Distribution> e;
  for (int i = 0; i < M_; ++i)
    e.push_back(Distribution::from_counts(
        std::span<const std::int64_t>(counts_.data() + i * alphabet_size_, static_cast<std::size_t>(alphabet_size_))));
  return DistributionTuple(std::move(e));
}

double group_score_from_counts(const std::int64_t* counts, int alphabet_size, std::int64_t k,
                               const Subset& group) {
  const int g = group.size();
  if (g <= 1) return 0.0;
  double s = 0.0;
  for (int x = 0; x < alphabet_size; ++x) {
    std::int64_t total = 0;
    for (std::uint64_t m = group.mask(); m; m &= m - 1) total += counts[std::countr_zero(m) * alphabet_size + x];
    if (total == 0) continue;
    for (std::uint64_t m = group.mask(); m; m &= m - 1) {
      const std::int64_t c = counts[std::countr_zero(m) * alphabet_size + x];
      if (c == 0) continue;
      // Integer numerator and denominator: equal counts give log(1) = 0 exactly.
      s += static_cast<double>(c) * std::log(static_cast<double>(c * g) / static_cast<double>(total));
    }
  }
  return std::max(0.0, s / static_cast<double>(k));
}

double score_from_counts(const std::int64_t* counts, int M, int alphabet_size, std::int64_t k,
                         const Subset& B) {
  return group_score_from_counts(counts, alphabet_size, k, B.complement(M)) +
         group_score_from_counts(counts, alphabet_size, k, B);
}

double score_li_from_counts(const std::int64_t* counts, int M, int alphabet_size, std::int64_t k,
                            const Subset& B) {
  return group_score_from_counts(counts, alphabet_size, k, B.complement(M));
}

DivergenceValue score(const ObservationMatrix& obs, const Subset& B) {
  if (obs.length() < 1) throw std::logic_error("no observations yet");
  check_candidate(obs.types(), B);
  return DivergenceValue(score_from_counts(obs.counts().data(), obs.M(), obs.alphabet_size(), obs.length(), B));
}

DivergenceValue score_li(const ObservationMatrix& obs, const Subset& B) {
  if (obs.length() < 1) throw std::logic_error("no observations yet");
  check_candidate(obs.types(), B);
  return DivergenceValue(score_li_from_counts(obs.counts().data(), obs.M(), obs.alphabet_size(), obs.length(), B));
}

double threshold_f(long long k, int M, int alphabet_size) {
  if (k < 1) throw std::invalid_argument("threshold needs k >= 1");
  const double kd = static_cast<double>(k);
  return static_cast<double>(M + 1) * alphabet_size * std::log(kd + 1.0) / kd;
}

double threshold_g(double beta, long long k, int M, int alphabet_size) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0,1)");
  return -std::log(beta * (alphabet_size - 1)) / static_cast<double>(k) + threshold_f(k, M, alphabet_size);
}

}  // namespace outlier
