#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace outlier {

using Symbol = int;

// Probability vector over a finite alphabet {0, ..., size-1}.
class Distribution {
 public:
  static constexpr double kSumTolerance = 1e-12;
  static constexpr double kEqualTolerance = 1e-12;

  explicit Distribution(Eigen::VectorXd probs);
  Distribution(std::initializer_list<double> probs);

  // Bernoulli with probability p of symbol 1.
  static Distribution bernoulli(double p);
  static Distribution uniform(int alphabet_size);
  static Distribution point_mass(int alphabet_size, Symbol s);
  // Normalizes counts by their total. Exact for integer counts.
  static Distribution from_counts(std::span<const std::int64_t> counts);

  int alphabet_size() const { return static_cast<int>(probs_.size()); }
  double operator[](int x) const { return probs_[x]; }
  const Eigen::VectorXd& probs() const { return probs_; }
  bool fully_supported() const;

  friend bool operator==(const Distribution& a, const Distribution& b) {
    return a.probs_.size() == b.probs_.size() && a.probs_ == b.probs_;
  }

 private:
  Eigen::VectorXd probs_;
};

bool approx_equal(const Distribution& a, const Distribution& b,
                  double tol = Distribution::kEqualTolerance);

// Arithmetic mean of the given distributions.
Distribution mixture(std::span<const Distribution> parts);

// Weighted mean (alpha*p + q) / (1 + alpha).
Distribution mix(const Distribution& p, const Distribution& q, double alpha);

Distribution empirical_type(std::span<const Symbol> sequence, int alphabet_size);

}  // namespace outlier
