#pragma once

#include "outlier/rng.hpp"
#include "outlier/scoring.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace outlier {

class HypothesisLabel {
 public:
  enum class Kind { outliers, null, undecided };

  static HypothesisLabel outliers(Subset set) { return HypothesisLabel(Kind::outliers, set); }
  static HypothesisLabel null() { return HypothesisLabel(Kind::null, Subset()); }
  static HypothesisLabel undecided() { return HypothesisLabel(Kind::undecided, Subset()); }

  Kind kind() const { return kind_; }
  bool is_null() const { return kind_ == Kind::null; }
  const Subset& set() const { return set_; }
  // "H_{1,2}", "H_r" or "undecided"; indices are 1-based.
  std::string to_string() const;

  friend bool operator==(const HypothesisLabel&, const HypothesisLabel&) = default;

 private:
  HypothesisLabel(Kind k, Subset s) : kind_(k), set_(s) {}
  Kind kind_ = Kind::undecided;
  Subset set_;
};

struct Verdict {
  HypothesisLabel label = HypothesisLabel::undecided();
  long long tau = 0;
  std::vector<std::pair<Subset, DivergenceValue>> final_scores;
  bool truncated = false;

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

enum class Regime {
  ep_exact_one,
  est_exact_one,
  est_exact_T,
  est_atmost_one,
  est_atmost_T,
  fix_lnv_one,
  fix_lnv_T,
  fix_zwh_one,
  fix_zwh_T,
};

std::string_view to_string(Regime r);
std::optional<Regime> parse_regime(std::string_view s);
bool is_sequential(Regime r);
bool is_at_most(Regime r);      // regimes that may return the null hypothesis
bool is_stopping_time_universal(Regime r);  // the EST family

struct TestConfig {
  Regime regime = Regime::est_exact_one;
  int M = 3;
  int T = 1;
  int alphabet_size = 2;
  double beta = 0.1;
  long long n = 100;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double lambda = 0.0;
  long long k_max = 1'000'000;

  // Throws std::invalid_argument on a violated invariant.
  void validate() const;
  friend bool operator==(const TestConfig&, const TestConfig&) = default;
};

// Columns either replayed from a fixed matrix or drawn fresh from a tuple of
// distributions with a seeded generator.
class ObservationSource {
 public:
  static ObservationSource replay(ObservationMatrix obs);
  static ObservationSource generative(const std::vector<Distribution>& rows, std::uint64_t seed,
                                      bool record = false);

  int M() const { return M_; }
  int alphabet_size() const { return alphabet_size_; }
  // Writes the next column; false when a replayed matrix is exhausted.
  bool next(std::span<Symbol> column);
  // Columns produced so far (replay: the whole matrix; generative: only when recording).
  const ObservationMatrix& recorded() const { return matrix_; }

 private:
  ObservationSource(int M, int alphabet_size) : M_(M), alphabet_size_(alphabet_size), matrix_(M, alphabet_size) {}

  int M_, alphabet_size_;
  bool replaying_ = false;
  bool recording_ = false;
  long long cursor_ = 0;
  ObservationMatrix matrix_;
  std::vector<Sampler> samplers_;
  std::optional<Rng> rng_;
};

Verdict run_ep_exact_one(ObservationSource& src, const TestConfig& cfg);
Verdict run_est_exact_one(ObservationSource& src, const TestConfig& cfg);
Verdict run_est_exact_T(ObservationSource& src, const TestConfig& cfg);
Verdict run_atmost_one(ObservationSource& src, const TestConfig& cfg);
Verdict run_atmost_T(ObservationSource& src, const TestConfig& cfg);

Verdict run_fixed_lnv_one(const ObservationMatrix& obs);
Verdict run_fixed_lnv_T(const ObservationMatrix& obs, int T);
Verdict run_fixed_zwh_one(const ObservationMatrix& obs, double lambda);
Verdict run_fixed_zwh_T(const ObservationMatrix& obs, int T, double lambda);

// Dispatch on cfg.regime. Fixed-length regimes consume cfg.n columns.
Verdict run_test(ObservationSource& src, const TestConfig& cfg);

}  // namespace outlier
