#pragma once

#include "outlier/distribution.hpp"

#include <compare>
#include <iosfwd>
#include <limits>

namespace outlier {

// Divergence in nats. Infinite is an explicit state, not a floating point inf.
class DivergenceValue {
 public:
  constexpr DivergenceValue() = default;
  explicit DivergenceValue(double v);

  static constexpr DivergenceValue infinite() {
    DivergenceValue d;
    d.infinite_ = true;
    return d;
  }

  bool is_infinite() const { return infinite_; }
  bool is_finite() const { return !infinite_; }
  // Throws std::domain_error when infinite.
  double value() const;
  // +inf for the infinite state.
  double to_double() const {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }

  DivergenceValue& operator+=(const DivergenceValue& o);
  friend DivergenceValue operator+(DivergenceValue a, const DivergenceValue& b) { return a += b; }
  // Scaling by a non-negative weight; 0 * Infinite is 0.
  friend DivergenceValue operator*(double w, const DivergenceValue& d);

  friend bool operator==(const DivergenceValue& a, const DivergenceValue& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }
  friend std::partial_ordering operator<=>(const DivergenceValue& a, const DivergenceValue& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ <=> b.infinite_;
    return a.value_ <=> b.value_;
  }
  friend bool operator==(const DivergenceValue& a, double b) { return a.is_finite() && a.value_ == b; }
  friend std::partial_ordering operator<=>(const DivergenceValue& a, double b) {
    if (a.infinite_) return std::partial_ordering::greater;
    return a.value_ <=> b;
  }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

std::ostream& operator<<(std::ostream& os, const DivergenceValue& d);

DivergenceValue kl(const Distribution& p, const Distribution& q);
double binary_kl(double p, double q);
DivergenceValue gjs(const Distribution& p, const Distribution& q, double alpha);
DivergenceValue renyi(const Distribution& p, const Distribution& q, double order);

// Grid minimizations over binary V, used to cross-check the closed forms.
// gjs:   min_V alpha*D(p||V) + D(q||V)
// renyi: min_V alpha*D(V||p) + D(V||q)  (equals renyi of order alpha/(1+alpha))
DivergenceValue gjs_variational_oracle(const Distribution& p, const Distribution& q,
                                       double alpha, double grid_step);
DivergenceValue renyi_variational_oracle(const Distribution& p, const Distribution& q,
                                         double alpha, double grid_step);

namespace detail {
// Raw KL over n entries, returns +inf on support mismatch.
double kl_raw(const double* p, const double* q, int n);
}  // namespace detail

}  // namespace outlier
