#pragma once

// Independent reference implementations used as test oracles. They work on
// plain vectors in long double and share no code with the library.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using Vec = std::vector<long double>;

inline Vec bern(long double p) { return {1.0L - p, p}; }

inline long double kl(const Vec& p, const Vec& q) {
  long double s = 0.0L;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] == 0.0L) continue;
    if (q[x] == 0.0L) return std::numeric_limits<long double>::infinity();
    s += p[x] * std::log(p[x] / q[x]);
  }
  return s;
}

inline Vec mean(const std::vector<Vec>& parts) {
  Vec m(parts.front().size(), 0.0L);
  for (const auto& v : parts)
    for (std::size_t x = 0; x < v.size(); ++x) m[x] += v[x];
  for (auto& v : m) v /= static_cast<long double>(parts.size());
  return m;
}

inline long double gjs(const Vec& p, const Vec& q, long double a) {
  Vec m(p.size());
  for (std::size_t x = 0; x < p.size(); ++x) m[x] = (a * p[x] + q[x]) / (1.0L + a);
  return a * kl(p, m) + kl(q, m);
}

inline long double renyi(const Vec& p, const Vec& q, long double order) {
  long double s = 0.0L;
  for (std::size_t x = 0; x < p.size(); ++x)
    if (p[x] > 0.0L) s += std::pow(p[x], order) * std::pow(q[x], 1.0L - order);
  return std::log(s) / (order - 1.0L);
}

// Sum over the listed entries of D(Q_j || their mean).
inline long double group(const std::vector<Vec>& Q, const std::vector<int>& idx) {
  if (idx.empty()) return 0.0L;
  std::vector<Vec> parts;
  for (int j : idx) parts.push_back(Q[static_cast<std::size_t>(j)]);
  const Vec m = mean(parts);
  long double s = 0.0L;
  for (const auto& v : parts) s += kl(v, m);
  return s;
}

inline std::vector<int> others(int M, const std::vector<int>& B) {
  std::vector<int> out;
  for (int j = 0; j < M; ++j) {
    bool in = false;
    for (int b : B) in = in || b == j;
    if (!in) out.push_back(j);
  }
  return out;
}

inline long double g_set(const std::vector<Vec>& Q, const std::vector<int>& B) {
  return group(Q, others(static_cast<int>(Q.size()), B)) + group(Q, B);
}
inline long double g_li(const std::vector<Vec>& Q, const std::vector<int>& B) {
  return group(Q, others(static_cast<int>(Q.size()), B));
}

// Every subset of {0..M-1} with size in [lo, hi], as sorted index lists.
inline std::vector<std::vector<int>> subsets(int M, int lo, int hi) {
  std::vector<std::vector<int>> out;
  for (std::uint64_t m = 1; m < (1ULL << M); ++m) {
    std::vector<int> s;
    for (int j = 0; j < M; ++j)
      if (m >> j & 1) s.push_back(j);
    if (static_cast<int>(s.size()) >= lo && static_cast<int>(s.size()) <= hi) out.push_back(s);
  }
  return out;
}

// Golden-section minimum of f on [0, 1] after a dense scan, for 1-D checks.
template <class F>
long double scan_min(F f, int points = 20000) {
  long double best = std::numeric_limits<long double>::infinity();
  long double at = 0.0L;
  for (int i = 1; i < points; ++i) {
    const long double v = static_cast<long double>(i) / points;
    const long double y = f(v);
    if (y < best) best = y, at = v;
  }
  long double lo = std::max(0.0L, at - 1.0L / points), hi = std::min(1.0L, at + 1.0L / points);
  const long double r = (std::sqrt(5.0L) - 1.0L) / 2.0L;
  for (int it = 0; it < 200; ++it) {
    const long double a = hi - r * (hi - lo), b = lo + r * (hi - lo);
    if (f(a) < f(b)) {
      hi = b;
    } else {
      lo = a;
    }
  }
  return std::min(best, f((lo + hi) / 2.0L));
}

inline double uniform_in(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

// Random fully supported probability vector.
inline std::vector<double> random_probs(std::mt19937_64& g, int size) {
  std::vector<double> v(static_cast<std::size_t>(size));
  double s = 0.0;
  for (auto& x : v) s += (x = uniform_in(g, 0.05, 1.0));
  for (auto& x : v) x /= s;
  return v;
}

inline Vec to_vec(const std::vector<double>& v) { return Vec(v.begin(), v.end()); }

}  // namespace oracle
