#pragma once

#include "outlier/distribution.hpp"
#include "outlier/divergence.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace outlier {

// Subset of the stream indices {0, ..., M-1}, M <= 64. Stored as a bitmask;
// members() gives the sorted index list.
class Subset {
 public:
  Subset() = default;
  explicit Subset(std::uint64_t mask) : mask_(mask) {}
  Subset(std::initializer_list<int> members);
  static Subset of(const std::vector<int>& members);
  static Subset range(int begin, int end);  // {begin, ..., end-1}

  std::uint64_t mask() const { return mask_; }
  int size() const;
  bool empty() const { return mask_ == 0; }
  bool contains(int i) const { return (mask_ >> i) & 1U; }
  bool is_subset_of(const Subset& o) const { return (mask_ & ~o.mask_) == 0; }
  std::vector<int> members() const;
  Subset complement(int M) const;

  // 1-based display, e.g. "{1,3}".
  std::string to_string() const;

  friend bool operator==(const Subset&, const Subset&) = default;

 private:
  std::uint64_t mask_ = 0;
};

// Lexicographic comparison of the sorted member lists.
bool lex_less(const Subset& a, const Subset& b);

// ceil(M/2 - 1): the largest admissible number of outliers.
int max_outliers(int M);

enum class CandidateMode { exact, at_most };

// Candidate outlier sets, lexicographically ordered.
class CandidateSet {
 public:
  CandidateSet(int M, int T, CandidateMode mode);

  int M() const { return M_; }
  int T() const { return T_; }
  CandidateMode mode() const { return mode_; }
  const std::vector<Subset>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  const Subset& operator[](std::size_t i) const { return members_[i]; }

 private:
  int M_, T_;
  CandidateMode mode_;
  std::vector<Subset> members_;
};

// Ordered list of M >= 3 distributions over a common alphabet.
class DistributionTuple {
 public:
  explicit DistributionTuple(std::vector<Distribution> entries);

  int M() const { return static_cast<int>(entries_.size()); }
  int alphabet_size() const { return entries_.front().alphabet_size(); }
  const Distribution& operator[](int i) const { return entries_[static_cast<std::size_t>(i)]; }
  const std::vector<Distribution>& entries() const { return entries_; }

  // pa at the positions in outliers, pn elsewhere.
  static DistributionTuple plug_in(const Distribution& pn, const Distribution& pa, int M,
                                   const Subset& outliers);

 private:
  std::vector<Distribution> entries_;
};

// Sum over the group of D(Q_j || group mean).
DivergenceValue group_divergence(const DistributionTuple& tuple, const Subset& group);

DivergenceValue g_i(const DistributionTuple& tuple, int i);
DivergenceValue g_set(const DistributionTuple& tuple, const Subset& B);
DivergenceValue g_li_set(const DistributionTuple& tuple, const Subset& B);

// M symbol sequences of equal length, grown one column at a time.
// Per-row symbol counts are kept so types never require a rescan.
class ObservationMatrix {
 public:
  ObservationMatrix(int M, int alphabet_size);
  static ObservationMatrix from_rows(const std::vector<std::vector<Symbol>>& rows, int alphabet_size);

  int M() const { return M_; }
  int alphabet_size() const { return alphabet_size_; }
  int length() const { return length_; }

  void append(std::span<const Symbol> column);
  const std::vector<Symbol>& row(int i) const { return rows_[static_cast<std::size_t>(i)]; }
  std::int64_t count(int i, Symbol x) const {
    return counts_[static_cast<std::size_t>(i * alphabet_size_ + x)];
  }
  const std::vector<std::int64_t>& counts() const { return counts_; }
  DistributionTuple types() const;

  friend bool operator==(const ObservationMatrix&, const ObservationMatrix&) = default;

 private:
  int M_, alphabet_size_;
  int length_ = 0;
  std::vector<std::vector<Symbol>> rows_;
  std::vector<std::int64_t> counts_;  // row-major M x |X|
};

// g_set of the row types (g_i when |B| = 1).
DivergenceValue score(const ObservationMatrix& obs, const Subset& B);
// g_li_set of the row types.
DivergenceValue score_li(const ObservationMatrix& obs, const Subset& B);

// Scores straight from an M x |X| count table with row length k. A group whose
// rows have identical counts contributes exactly 0.
double group_score_from_counts(const std::int64_t* counts, int alphabet_size, std::int64_t k,
                               const Subset& group);
double score_from_counts(const std::int64_t* counts, int M, int alphabet_size, std::int64_t k,
                         const Subset& B);
double score_li_from_counts(const std::int64_t* counts, int M, int alphabet_size, std::int64_t k,
                            const Subset& B);

double threshold_g(double beta, long long k, int M, int alphabet_size);
double threshold_f(long long k, int M, int alphabet_size);

}  // namespace outlier
