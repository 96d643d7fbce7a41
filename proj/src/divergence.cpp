#include "outlier/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace outlier {

DivergenceValue::DivergenceValue(double v) {
  if (std::isnan(v)) throw std::domain_error("divergence is NaN");
  if (std::isinf(v)) {
    if (v < 0) throw std::domain_error("divergence is -inf");
    infinite_ = true;
    return;
  }
  // Rounding can leave tiny negative residues.
  if (v <= 0.0) {
    if (v < -1e-9) throw std::domain_error("negative divergence");
    v = 0.0;
  }
  value_ = v;
}

double DivergenceValue::value() const {
  if (infinite_) throw std::domain_error("divergence is infinite");
  return value_;
}

DivergenceValue& DivergenceValue::operator+=(const DivergenceValue& o) {
  if (infinite_ || o.infinite_) {
    infinite_ = true;
    value_ = 0.0;
  } else {
    value_ += o.value_;
  }
  return *this;
}

DivergenceValue operator*(double w, const DivergenceValue& d) {
  if (w < 0.0) throw std::domain_error("negative weight on divergence");
  if (w == 0.0) return DivergenceValue(0.0);
  if (d.infinite_) return d;
  return DivergenceValue(w * d.value_);
}

std::ostream& operator<<(std::ostream& os, const DivergenceValue& d) {
  if (d.is_infinite()) return os << "inf";
  return os << d.value();
}

namespace detail {

double kl_raw(const double* p, const double* q, int n) {
  double s = 0.0;
  for (int x = 0; x < n; ++x) {
    if (p[x] <= 0.0) continue;
    if (q[x] <= 0.0) return std::numeric_limits<double>::infinity();
    s += p[x] * std::log(p[x] / q[x]);
  }
  return s;
}

}  // namespace detail

namespace {

void require_same_alphabet(const Distribution& p, const Distribution& q) {
  if (p.alphabet_size() != q.alphabet_size()) throw std::invalid_argument("alphabet size mismatch");
}

void require_binary(const Distribution& p, const Distribution& q) {
  require_same_alphabet(p, q);
  if (p.alphabet_size() != 2) throw std::invalid_argument("oracle supports the binary alphabet only");
}

// Minimizes f over v in [0,1]: full grid at `step`, then two local passes at step/10, step/100.
template <class F>
double minimize_on_unit_interval(F&& f, double step) {
  if (!(step > 0.0 && step <= 0.5)) throw std::invalid_argument("grid step must be in (0, 0.5]");
  const long n = static_cast<long>(std::ceil(1.0 / step));
  double best_v = 0.0, best = f(0.0);
  for (long i = 1; i <= n; ++i) {
    double v = std::min(1.0, static_cast<double>(i) * step);
    double y = f(v);
    if (y < best) best = y, best_v = v;
  }
  double h = step;
  for (int round = 0; round < 2; ++round) {
    const double lo = std::max(0.0, best_v - h), hi = std::min(1.0, best_v + h);
    h /= 10.0;
    for (double v = lo; v <= hi + 0.5 * h; v += h) {
      double vc = std::min(v, 1.0);
      double y = f(vc);
      if (y < best) best = y, best_v = vc;
    }
  }
  return best;
}

}  // namespace

DivergenceValue kl(const Distribution& p, const Distribution& q) {
  require_same_alphabet(p, q);
  return DivergenceValue(detail::kl_raw(p.probs().data(), q.probs().data(), p.alphabet_size()));
}

double binary_kl(double p, double q) {
  if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0))
    throw std::domain_error("binary_kl arguments must lie strictly inside (0,1)");
  return p * std::log(p / q) + (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
}

DivergenceValue gjs(const Distribution& p, const Distribution& q, double alpha) {
  require_same_alphabet(p, q);
  if (!(alpha >= 0.0)) throw std::domain_error("gjs weight must be non-negative");
  if (alpha == 0.0 || p == q) return DivergenceValue(0.0);
  const Distribution m = mix(p, q, alpha);
  return alpha * kl(p, m) + kl(q, m);
}

DivergenceValue renyi(const Distribution& p, const Distribution& q, double order) {
  require_same_alphabet(p, q);
  if (!(order >= 0.0 && order < 1.0)) throw std::domain_error("renyi order must lie in [0,1)");
  if (p == q) return DivergenceValue(0.0);
  double s = 0.0;
  for (int x = 0; x < p.alphabet_size(); ++x) {
    if (p[x] <= 0.0) continue;
    s += order == 0.0 ? q[x] : std::pow(p[x], order) * std::pow(q[x], 1.0 - order);
  }
  if (s <= 0.0) return DivergenceValue::infinite();
  return DivergenceValue(std::log(s) / (order - 1.0));
}

DivergenceValue gjs_variational_oracle(const Distribution& p, const Distribution& q, double alpha,
                                       double grid_step) {
  require_binary(p, q);
  if (!(alpha >= 0.0)) throw std::domain_error("gjs weight must be non-negative");
  auto f = [&](double v) {
    const double V[2] = {1.0 - v, v};
    return alpha * detail::kl_raw(p.probs().data(), V, 2) + detail::kl_raw(q.probs().data(), V, 2);
  };
  return DivergenceValue(minimize_on_unit_interval(f, grid_step));
}

DivergenceValue renyi_variational_oracle(const Distribution& p, const Distribution& q, double alpha,
                                         double grid_step) {
  require_binary(p, q);
  if (!(alpha >= 0.0)) throw std::domain_error("renyi oracle weight must be non-negative");
  auto f = [&](double v) {
    const double V[2] = {1.0 - v, v};
    return alpha * detail::kl_raw(V, p.probs().data(), 2) + detail::kl_raw(V, q.probs().data(), 2);
  };
  return DivergenceValue(minimize_on_unit_interval(f, grid_step));
}

}  // namespace outlier
