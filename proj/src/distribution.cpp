#include "outlier/distribution.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace outlier {

namespace {

void validate(const Eigen::VectorXd& p) {
  if (p.size() < 2) throw std::invalid_argument("distribution needs an alphabet of size >= 2");
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i]) || p[i] < 0.0)
      throw std::invalid_argument("distribution entry " + std::to_string(i) + " is negative or not finite");
  }
  if (std::abs(p.sum() - 1.0) > Distribution::kSumTolerance)
    throw std::invalid_argument("distribution does not sum to 1");
}

}  // namespace

Distribution::Distribution(Eigen::VectorXd probs) : probs_(std::move(probs)) { validate(probs_); }

Distribution::Distribution(std::initializer_list<double> probs)
    : probs_(Eigen::Map<const Eigen::VectorXd>(probs.begin(), static_cast<Eigen::Index>(probs.size()))) {
  validate(probs_);
}

Distribution Distribution::bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bernoulli parameter outside [0,1]");
  return Distribution{1.0 - p, p};
}

Distribution Distribution::uniform(int alphabet_size) {
  if (alphabet_size < 2) throw std::invalid_argument("alphabet size must be >= 2");
  return Distribution(Eigen::VectorXd::Constant(alphabet_size, 1.0 / alphabet_size));
}

Distribution Distribution::point_mass(int alphabet_size, Symbol s) {
  if (alphabet_size < 2 || s < 0 || s >= alphabet_size)
    throw std::invalid_argument("point mass symbol out of range");
  Eigen::VectorXd p = Eigen::VectorXd::Zero(alphabet_size);
  p[s] = 1.0;
  return Distribution(std::move(p));
}

Distribution Distribution::from_counts(std::span<const std::int64_t> counts) {
  std::int64_t total = 0;
  for (auto c : counts) {
    if (c < 0) throw std::invalid_argument("negative count");
    total += c;
  }
  if (total == 0) throw std::invalid_argument("counts are all zero");
  Eigen::VectorXd p(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t i = 0; i < counts.size(); ++i)
    p[static_cast<Eigen::Index>(i)] = static_cast<double>(counts[i]) / static_cast<double>(total);
  return Distribution(std::move(p));
}

bool Distribution::fully_supported() const { return (probs_.array() > 0.0).all(); }

bool approx_equal(const Distribution& a, const Distribution& b, double tol) {
  if (a.alphabet_size() != b.alphabet_size()) return false;
  return ((a.probs() - b.probs()).cwiseAbs().array() <= tol).all();
}

Distribution mixture(std::span<const Distribution> parts) {
  if (parts.empty()) throw std::invalid_argument("mixture of nothing");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(parts.front().alphabet_size());
  for (const auto& d : parts) {
    if (d.alphabet_size() != acc.size()) throw std::invalid_argument("alphabet mismatch");
    acc += d.probs();
  }
  acc /= static_cast<double>(parts.size());
  return Distribution(std::move(acc));
}

Distribution mix(const Distribution& p, const Distribution& q, double alpha) {
  if (p.alphabet_size() != q.alphabet_size()) throw std::invalid_argument("alphabet mismatch");
  if (alpha < 0.0) throw std::invalid_argument("negative mixing weight");
  return Distribution(((alpha * p.probs() + q.probs()) / (1.0 + alpha)).eval());
}

Distribution empirical_type(std::span<const Symbol> sequence, int alphabet_size) {
  if (sequence.empty()) throw std::invalid_argument("empty sequence");
  if (alphabet_size < 2) throw std::invalid_argument("alphabet size must be >= 2");
  std::vector<std::int64_t> counts(static_cast<std::size_t>(alphabet_size), 0);
  for (Symbol s : sequence) {
    if (s < 0 || s >= alphabet_size) throw std::out_of_range("symbol out of range");
    ++counts[static_cast<std::size_t>(s)];
  }
  return Distribution::from_counts(counts);
}

}  // namespace outlier
