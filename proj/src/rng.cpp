#include "outlier/rng.hpp"

#include <algorithm>
#include <stdexcept>

namespace outlier {

Sampler::Sampler(const Distribution& dist) {
  cdf_.resize(static_cast<std::size_t>(dist.alphabet_size()));
  double acc = 0.0;
  for (int x = 0; x < dist.alphabet_size(); ++x) {
    acc += dist[x];
    cdf_[static_cast<std::size_t>(x)] = acc;
  }
}

Symbol Sampler::operator()(Rng& rng) const {
  const double u = rng.uniform();
  // First symbol whose cumulative mass exceeds u; the last symbol absorbs rounding.
  auto it = std::upper_bound(cdf_.begin(), cdf_.end() - 1, u);
  return static_cast<Symbol>(it - cdf_.begin());
}

std::vector<Symbol> sample(const Distribution& dist, int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample size must be >= 1");
  Sampler s(dist);
  std::vector<Symbol> out(static_cast<std::size_t>(n));
  for (auto& x : out) x = s(rng);
  return out;
}

}  // namespace outlier
