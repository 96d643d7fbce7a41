#pragma once

#include "outlier/distribution.hpp"

#include <cstdint>
#include <vector>

namespace outlier {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed for one Monte Carlo trial:
//   mix64(mix64(mix64(master) ^ sweep) ^ trial)
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t sweep,
                                    std::uint64_t trial) {
  return mix64(mix64(mix64(master) ^ sweep) ^ trial);
}

// Counter-based generator: the i-th output is mix64(seed + i * golden_gamma),
// so a stream is fully determined by (seed, counter).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() {
    ++counter_;
    return mix64(seed_ + counter_ * 0x9e3779b97f4a7c15ULL);
  }
  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

// Inverse-CDF sampler with a precomputed cumulative vector.
class Sampler {
 public:
  explicit Sampler(const Distribution& dist);
  Symbol operator()(Rng& rng) const;

 private:
  std::vector<double> cdf_;
};

std::vector<Symbol> sample(const Distribution& dist, int n, Rng& rng);

}  // namespace outlier
