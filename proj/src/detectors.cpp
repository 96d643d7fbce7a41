#include "outlier/detectors.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <stdexcept>

namespace outlier {

std::string HypothesisLabel::to_string() const {
  switch (kind_) {
    case Kind::outliers: {
      std::string s = set_.to_string();
      return "H_" + s;
    }
    case Kind::null: return "H_r";
    case Kind::undecided: break;
  }
  return "undecided";
}

namespace {

constexpr std::array<std::pair<Regime, std::string_view>, 9> kRegimeNames{{
    {Regime::ep_exact_one, "ep-exact-one"},
    {Regime::est_exact_one, "est-exact-one"},
    {Regime::est_exact_T, "est-exact-T"},
    {Regime::est_atmost_one, "est-atmost-one"},
    {Regime::est_atmost_T, "est-atmost-T"},
    {Regime::fix_lnv_one, "fix-lnv-one"},
    {Regime::fix_lnv_T, "fix-lnv-T"},
    {Regime::fix_zwh_one, "fix-zwh-one"},
    {Regime::fix_zwh_T, "fix-zwh-T"},
}};

}  // namespace

std::string_view to_string(Regime r) {
  for (const auto& [reg, name] : kRegimeNames)
    if (reg == r) return name;
  return "?";
}

std::optional<Regime> parse_regime(std::string_view s) {
  for (const auto& [reg, name] : kRegimeNames)
    if (name == s) return reg;
  return std::nullopt;
}

bool is_sequential(Regime r) {
  return r == Regime::ep_exact_one || r == Regime::est_exact_one || r == Regime::est_exact_T ||
         r == Regime::est_atmost_one || r == Regime::est_atmost_T;
}

bool is_at_most(Regime r) {
  return r == Regime::est_atmost_one || r == Regime::est_atmost_T || r == Regime::fix_zwh_one ||
         r == Regime::fix_zwh_T;
}

bool is_stopping_time_universal(Regime r) {
  return r == Regime::est_exact_one || r == Regime::est_exact_T || r == Regime::est_atmost_one ||
         r == Regime::est_atmost_T;
}

namespace {

bool single_outlier(Regime r) {
  return r == Regime::ep_exact_one || r == Regime::est_exact_one || r == Regime::est_atmost_one ||
         r == Regime::fix_lnv_one || r == Regime::fix_zwh_one;
}

}  // namespace

void TestConfig::validate() const {
  if (M < 3 || M > 64) throw std::invalid_argument("M must be in [3, 64]");
  if (alphabet_size < 2) throw std::invalid_argument("alphabet_size must be >= 2");
  if (T < 1 || T > max_outliers(M))
    throw std::invalid_argument("T must satisfy 0 < T <= ceil(M/2 - 1)");
  if (single_outlier(regime) && T != 1) throw std::invalid_argument("single-outlier regime requires T = 1");
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (k_max <= n) throw std::invalid_argument("k_max must exceed n");
  if (regime == Regime::ep_exact_one && !(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("beta must lie in (0,1)");
  if ((regime == Regime::est_atmost_one || regime == Regime::est_atmost_T) &&
      !(lambda2 > 0.0 && lambda2 < lambda1))
    throw std::invalid_argument("at-most regimes require 0 < lambda2 < lambda1");
  if ((regime == Regime::fix_zwh_one || regime == Regime::fix_zwh_T) && !(lambda > 0.0))
    throw std::invalid_argument("fixed rejection test requires lambda > 0");
}

ObservationSource ObservationSource::replay(ObservationMatrix obs) {
  ObservationSource s(obs.M(), obs.alphabet_size());
  s.matrix_ = std::move(obs);
  s.replaying_ = true;
  return s;
}

ObservationSource ObservationSource::generative(const std::vector<Distribution>& rows, std::uint64_t seed,
                                                bool record) {
  if (rows.empty()) throw std::invalid_argument("generative source needs at least one row");
  ObservationSource s(static_cast<int>(rows.size()), rows.front().alphabet_size());
  for (const auto& d : rows) {
    if (d.alphabet_size() != s.alphabet_size_) throw std::invalid_argument("rows use different alphabets");
    s.samplers_.emplace_back(d);
  }
  s.rng_.emplace(seed);
  s.recording_ = record;
  return s;
}

bool ObservationSource::next(std::span<Symbol> column) {
  if (static_cast<int>(column.size()) != M_) throw std::invalid_argument("column buffer has wrong height");
  if (replaying_) {
    if (cursor_ >= matrix_.length()) return false;
    for (int i = 0; i < M_; ++i) column[static_cast<std::size_t>(i)] = matrix_.row(i)[static_cast<std::size_t>(cursor_)];
    ++cursor_;
    return true;
  }
  for (int i = 0; i < M_; ++i) column[static_cast<std::size_t>(i)] = samplers_[static_cast<std::size_t>(i)](*rng_);
  if (recording_) matrix_.append(column);
  return true;
}

namespace {

enum class Rule { ep, est, at_most };
enum class ScoreKind { full, li };

struct Ranked {
  std::size_t best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  double second_score = std::numeric_limits<double>::infinity();
};

// Strict comparisons keep the first (lexicographically smallest) candidate on ties.
Ranked rank(const std::vector<double>& s) {
  Ranked r;
  for (std::size_t c = 0; c < s.size(); ++c) {
    if (s[c] < r.best_score) {
      r.second_score = r.best_score;
      r.best_score = s[c];
      r.best = c;
    } else if (s[c] < r.second_score) {
      r.second_score = s[c];
    }
  }
  return r;
}

std::vector<std::pair<Subset, DivergenceValue>> pack(const std::vector<Subset>& cands,
                                                     const std::vector<double>& s) {
  std::vector<std::pair<Subset, DivergenceValue>> out;
  out.reserve(cands.size());
  for (std::size_t c = 0; c < cands.size(); ++c) out.emplace_back(cands[c], DivergenceValue(s[c]));
  return out;
}

void compute_scores(const std::vector<std::int64_t>& counts, int M, int X, long long k,
                    const std::vector<Subset>& cands, ScoreKind kind, std::vector<double>& out) {
  out.resize(cands.size());
  for (std::size_t c = 0; c < cands.size(); ++c)
    out[c] = kind == ScoreKind::full ? score_from_counts(counts.data(), M, X, k, cands[c])
                                     : score_li_from_counts(counts.data(), M, X, k, cands[c]);
}

Verdict run_sequential(ObservationSource& src, const TestConfig& cfg, const std::vector<Subset>& cands,
                       Rule rule) {
  cfg.validate();
  if (src.M() != cfg.M || src.alphabet_size() != cfg.alphabet_size)
    throw std::invalid_argument("observation source does not match the test configuration");
  const int M = cfg.M, X = cfg.alphabet_size;
  const long long start = rule == Rule::ep ? 1 : std::max(1LL, cfg.n - 1);

  std::vector<std::int64_t> counts(static_cast<std::size_t>(M * X), 0);
  std::vector<Symbol> column(static_cast<std::size_t>(M));
  std::vector<double> s;
  long long k = 0;

  while (k < cfg.k_max) {
    if (!src.next(column)) break;
    ++k;
    for (int i = 0; i < M; ++i) ++counts[static_cast<std::size_t>(i * X + column[static_cast<std::size_t>(i)])];
    if (k < start) continue;

    compute_scores(counts, M, X, k, cands, ScoreKind::full, s);
    const Ranked r = rank(s);
    Verdict v;
    v.tau = k;

    if (rule == Rule::ep) {
      const double thr = threshold_g(cfg.beta, k, M, X);
      int above = 0;
      std::size_t below_idx = 0;
      for (std::size_t c = 0; c < s.size(); ++c) {
        if (s[c] > thr) ++above;
        else below_idx = c;
      }
      if (above < M - 1) continue;
      v.label = HypothesisLabel::outliers(cands[above == M - 1 ? below_idx : r.best]);
    } else if (rule == Rule::est) {
      if (r.best_score > threshold_f(k, M, X)) continue;
      v.label = HypothesisLabel::outliers(cands[r.best]);
    } else {
      double largest = 0.0;
      for (double x : s) largest = std::max(largest, x);
      if (r.best_score <= cfg.lambda2 && r.second_score > cfg.lambda1) v.label = HypothesisLabel::outliers(cands[r.best]);
      else if (largest <= cfg.lambda2) v.label = HypothesisLabel::null();
      else continue;
    }
    v.final_scores = pack(cands, s);
    return v;
  }

  if (k == 0) throw std::runtime_error("observation source produced no columns");
  Verdict v;
  v.tau = k;
  v.truncated = true;
  compute_scores(counts, M, X, k, cands, ScoreKind::full, s);
  v.final_scores = pack(cands, s);
  v.label = rule == Rule::at_most ? HypothesisLabel::null() : HypothesisLabel::outliers(cands[rank(s).best]);
  return v;
}

void expect_regime(Regime want, const TestConfig& cfg) {
  if (cfg.regime != want) throw std::invalid_argument("test configuration has a different regime");
}

Verdict run_fixed(const ObservationMatrix& obs, const std::vector<Subset>& cands, ScoreKind kind,
                  std::optional<double> reject_level) {
  if (obs.length() < 1) throw std::invalid_argument("empty observation matrix");
  std::vector<double> s;
  compute_scores(obs.counts(), obs.M(), obs.alphabet_size(), obs.length(), cands, kind, s);
  const Ranked r = rank(s);
  Verdict v;
  v.tau = obs.length();
  v.final_scores = pack(cands, s);
  if (reject_level && !(r.second_score > *reject_level)) v.label = HypothesisLabel::null();
  else v.label = HypothesisLabel::outliers(cands[r.best]);
  return v;
}

}  // namespace

Verdict run_ep_exact_one(ObservationSource& src, const TestConfig& cfg) {
  expect_regime(Regime::ep_exact_one, cfg);
  return run_sequential(src, cfg, CandidateSet(cfg.M, 1, CandidateMode::exact).members(), Rule::ep);
}

Verdict run_est_exact_one(ObservationSource& src, const TestConfig& cfg) {
  expect_regime(Regime::est_exact_one, cfg);
  return run_sequential(src, cfg, CandidateSet(cfg.M, 1, CandidateMode::exact).members(), Rule::est);
}

Verdict run_est_exact_T(ObservationSource& src, const TestConfig& cfg) {
  expect_regime(Regime::est_exact_T, cfg);
  return run_sequential(src, cfg, CandidateSet(cfg.M, cfg.T, CandidateMode::exact).members(), Rule::est);
}

Verdict run_atmost_one(ObservationSource& src, const TestConfig& cfg) {
  expect_regime(Regime::est_atmost_one, cfg);
  return run_sequential(src, cfg, CandidateSet(cfg.M, 1, CandidateMode::at_most).members(), Rule::at_most);
}

Verdict run_atmost_T(ObservationSource& src, const TestConfig& cfg) {
  expect_regime(Regime::est_atmost_T, cfg);
  return run_sequential(src, cfg, CandidateSet(cfg.M, cfg.T, CandidateMode::at_most).members(), Rule::at_most);
}

Verdict run_fixed_lnv_one(const ObservationMatrix& obs) {
  return run_fixed(obs, CandidateSet(obs.M(), 1, CandidateMode::exact).members(), ScoreKind::full, std::nullopt);
}

Verdict run_fixed_lnv_T(const ObservationMatrix& obs, int T) {
  return run_fixed(obs, CandidateSet(obs.M(), T, CandidateMode::exact).members(), ScoreKind::li, std::nullopt);
}

Verdict run_fixed_zwh_one(const ObservationMatrix& obs, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  return run_fixed(obs, CandidateSet(obs.M(), 1, CandidateMode::exact).members(), ScoreKind::full, lambda);
}

Verdict run_fixed_zwh_T(const ObservationMatrix& obs, int T, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  return run_fixed(obs, CandidateSet(obs.M(), T, CandidateMode::at_most).members(), ScoreKind::full, lambda);
}

Verdict run_test(ObservationSource& src, const TestConfig& cfg) {
  cfg.validate();
  switch (cfg.regime) {
    case Regime::ep_exact_one: return run_ep_exact_one(src, cfg);
    case Regime::est_exact_one: return run_est_exact_one(src, cfg);
    case Regime::est_exact_T: return run_est_exact_T(src, cfg);
    case Regime::est_atmost_one: return run_atmost_one(src, cfg);
    case Regime::est_atmost_T: return run_atmost_T(src, cfg);
    default: break;
  }
  ObservationMatrix obs(cfg.M, cfg.alphabet_size);
  std::vector<Symbol> column(static_cast<std::size_t>(cfg.M));
  for (long long k = 0; k < cfg.n; ++k) {
    if (!src.next(column)) throw std::invalid_argument("observation source is shorter than the fixed length");
    obs.append(column);
  }
  switch (cfg.regime) {
    case Regime::fix_lnv_one: return run_fixed_lnv_one(obs);
    case Regime::fix_lnv_T: return run_fixed_lnv_T(obs, cfg.T);
    case Regime::fix_zwh_one: return run_fixed_zwh_one(obs, cfg.lambda);
    case Regime::fix_zwh_T: return run_fixed_zwh_T(obs, cfg.T, cfg.lambda);
    default: break;
  }
  throw std::logic_error("unhandled regime");
}

}  // namespace outlier
