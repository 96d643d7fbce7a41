#include "outlier/exponents.hpp"

#include <stdexcept>

namespace outlier {

namespace {

void check_pair(const Distribution& pn, const Distribution& pa, int M) {
  if (pn.alphabet_size() != pa.alphabet_size()) throw std::invalid_argument("alphabet size mismatch");
  if (M < 3) throw std::invalid_argument("M must be >= 3");
}

}  // namespace

double exp_ep_exact_one(const Distribution& pn, const Distribution& pa, int M) {
  check_pair(pn, pa, M);
  return gjs(pn, pa, M - 2.0).to_double();
}

double exp_est_exact_one(const Distribution& pn, const Distribution& pa, int M) {
  check_pair(pn, pa, M);
  return renyi(pn, pa, (M - 2.0) / (M - 1.0)).to_double();
}

LdResult exp_ld(const Distribution& pn, const Distribution& pa, int M, int T) {
  check_pair(pn, pa, M);
  if (T < 1 || T > max_outliers(M)) throw std::invalid_argument("T must satisfy 0 < T <= ceil(M/2 - 1)");
  LdResult best;
  bool first = true;
  for (int t = 0; t < T; ++t) {
    const DivergenceValue term = renyi(pa, pn, static_cast<double>(t) / T) +
                                 renyi(pn, pa, static_cast<double>(M - 2 * T + t) / (M - T));
    const double v = (T - t) * term.to_double();
    if (first || v < best.value) {
      best = {v, t};
      first = false;
    }
  }
  return best;
}

}  // namespace outlier
