#include "outlier/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace outlier {

std::string_view to_string(CandidateFamily f) {
  switch (f) {
    case CandidateFamily::all: return "all";
    case CandidateFamily::no_supersets: return "no-supersets";
    case CandidateFamily::same_size: return "same-size";
  }
  return "?";
}

namespace {

void check_inputs(const Distribution& pn, const Distribution& pa, int M, int T, const Subset& B) {
  if (pn.alphabet_size() != pa.alphabet_size()) throw std::invalid_argument("alphabet size mismatch");
  if (M < 3 || M > 64) throw std::invalid_argument("M must be in [3, 64]");
  if (T < 1 || T > max_outliers(M)) throw std::invalid_argument("T must satisfy 0 < T <= ceil(M/2 - 1)");
  if (B.empty() || B.size() > T || !B.is_subset_of(Subset::range(0, M)))
    throw std::invalid_argument("true outlier set must have between 1 and T members");
}

void check_lambda(double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
}

std::vector<Distribution> plug_in(const Distribution& pn, const Distribution& pa, int M, const Subset& B) {
  return DistributionTuple::plug_in(pn, pa, M, B).entries();
}

struct Tagged {
  TupleProblem problem;
  Subset C, D;
};

// Minimum over problems; structurally identical problems are solved once.
ConstrainedExponent min_over(const std::vector<Tagged>& problems, const SimplexOptimizerSettings& settings) {
  ConstrainedExponent best;
  bool have = false;
  std::set<std::string> seen;
  for (const auto& t : problems) {
    const ReducedProblem r = reduce(t.problem);
    if (!seen.insert(r.key()).second) continue;
    KlSumResult res = minimize_kl_sum(r, settings);
    if (!res.feasible) continue;
    if (!have || res.value < best.value) {
      std::vector<Distribution> full;
      for (int j = 0; j < t.problem.M(); ++j)
        full.push_back(res.argmin[static_cast<std::size_t>(r.class_of_position[static_cast<std::size_t>(j)])]);
      best = {res.value, t.C, t.D, std::move(full)};
      have = true;
    }
  }
  if (!have) throw std::runtime_error("no feasible point found for any competing set");
  return best;
}

// One representative true set per size: {0}, {0,1}, ...
std::vector<Subset> representatives(int T) {
  std::vector<Subset> out;
  for (int s = 1; s <= T; ++s) out.push_back(Subset::range(0, s));
  return out;
}

}  // namespace

std::vector<Subset> competing_sets(int M, int T, const Subset& B, CandidateFamily family) {
  std::vector<Subset> out;
  const CandidateSet all(M, T, CandidateMode::at_most);
  for (const auto& C : all.members()) {
    if (C == B) continue;
    if (family == CandidateFamily::no_supersets && B.is_subset_of(C)) continue;
    if (family == CandidateFamily::same_size && C.size() != B.size()) continue;
    out.push_back(C);
  }
  return out;
}

ConstrainedExponent exp_omega_set(double lambda, const Distribution& pn, const Distribution& pa, int M,
                                  const Subset& B, int T, CandidateFamily family,
                                  const SimplexOptimizerSettings& settings) {
  check_inputs(pn, pa, M, T, B);
  check_lambda(lambda);
  std::vector<Tagged> problems;
  for (const auto& C : competing_sets(M, T, B, family))
    problems.push_back({{plug_in(pn, pa, M, B), {TupleConstraint::at_most(C, lambda)}}, C, Subset()});
  return min_over(problems, settings);
}

ConstrainedExponent exp_omega_one(double lambda, const Distribution& pn, const Distribution& pa, int M,
                                  const SimplexOptimizerSettings& settings) {
  return exp_omega_set(lambda, pn, pa, M, Subset{0}, 1, CandidateFamily::all, settings);
}

ConstrainedExponent exp_l_set(double lambda, const Distribution& pn, const Distribution& pa, int M,
                              const Subset& B, int T, CandidateFamily family,
                              const SimplexOptimizerSettings& settings) {
  check_inputs(pn, pa, M, T, B);
  check_lambda(lambda);
  std::vector<Subset> family_sets = competing_sets(M, T, B, family);
  family_sets.push_back(B);
  std::sort(family_sets.begin(), family_sets.end(), lex_less);
  std::vector<Tagged> problems;
  for (std::size_t a = 0; a < family_sets.size(); ++a)
    for (std::size_t b = a + 1; b < family_sets.size(); ++b)
      problems.push_back({{plug_in(pn, pa, M, B),
                           {TupleConstraint::at_most(family_sets[a], lambda), TupleConstraint::at_most(family_sets[b], lambda)}},
                          family_sets[a], family_sets[b]});
  return min_over(problems, settings);
}

ConstrainedExponent exp_l_one(double lambda, const Distribution& pn, const Distribution& pa, int M,
                              const SimplexOptimizerSettings& settings) {
  return exp_l_set(lambda, pn, pa, M, Subset{0}, 1, CandidateFamily::all, settings);
}

double lambda_tilde1(const Distribution& pn, const Distribution& pa, int M, int T, const Subset& B,
                     CandidateFamily family) {
  check_inputs(pn, pa, M, T, B);
  const DistributionTuple t = DistributionTuple::plug_in(pn, pa, M, B);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& C : competing_sets(M, T, B, family)) best = std::min(best, g_set(t, C).to_double());
  return best;
}

ConstrainedExponent exp_fixed_lnv_one(const Distribution& pn, const Distribution& pa, int M,
                                      const SimplexOptimizerSettings& settings) {
  check_inputs(pn, pa, M, 1, Subset{0});
  // Every competitor j != 0 is equivalent; position 1 stands for all of them.
  std::vector<Tagged> problems{
      {{plug_in(pn, pa, M, Subset{0}), {TupleConstraint::dominates(Subset{0}, Subset{1})}}, Subset{1}, Subset()}};
  return min_over(problems, settings);
}

ConstrainedExponent exp_fixed_lnv_T(const Distribution& pn, const Distribution& pa, int M, int T,
                                    const SimplexOptimizerSettings& settings) {
  const Subset B = Subset::range(0, T);
  check_inputs(pn, pa, M, T, B);
  std::vector<Tagged> problems;
  const CandidateSet exact(M, T, CandidateMode::exact);
  for (const auto& C : exact.members()) {
    if (C == B) continue;
    problems.push_back({{plug_in(pn, pa, M, B), {TupleConstraint::dominates(B, C)}}, C, Subset()});
  }
  return min_over(problems, settings);
}

BayesResult bayes_fixed(const Distribution& pn, const Distribution& pa, int M, int T, CandidateFamily family,
                        const SimplexOptimizerSettings& settings) {
  check_inputs(pn, pa, M, T, Subset{0});
  const auto reps = representatives(T);
  double upper = std::numeric_limits<double>::infinity();
  for (const auto& B : reps) upper = std::min(upper, lambda_tilde1(pn, pa, M, T, B, family));
  if (!(upper > 0.0)) return {};

  auto L = [&](double lambda) {
    double v = std::numeric_limits<double>::infinity();
    for (const auto& B : reps) v = std::min(v, exp_l_set(lambda, pn, pa, M, B, T, family, settings).value);
    return v;
  };
  auto h = [&](double lambda) { return std::min(lambda, L(lambda)); };

  // Bracket the crossing of lambda and the non-increasing L on a uniform grid.
  constexpr int kGrid = 10;
  double lo = 0.0, hi = upper;
  BayesResult best;
  for (int i = 1; i <= kGrid; ++i) {
    const double lam = upper * i / kGrid;
    const double l = L(lam);
    const double v = std::min(lam, l);
    if (v > best.value) best = {v, lam, 0.0, 0.0};
    if (lam >= l) {
      hi = lam;
      break;
    }
    lo = lam;
  }

  // Golden-section search for the maximum of min(lambda, L(lambda)) inside the bracket.
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = h(x1), f2 = h(x2);
  for (int it = 0; it < 24; ++it) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = h(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = h(x2);
    }
  }
  // Grid fallback: keep whichever point scored higher.
  if (f1 > best.value) best = {f1, x1, 0.0, 0.0};
  if (f2 > best.value) best = {f2, x2, 0.0, 0.0};
  return best;
}

BayesResult bayes_seq(const Distribution& pn, const Distribution& pa, int M, int T,
                      const std::vector<double>& lambda2_grid, CandidateFamily family,
                      const SimplexOptimizerSettings& settings) {
  check_inputs(pn, pa, M, T, Subset{0});
  if (lambda2_grid.empty()) throw std::invalid_argument("lambda2 grid is empty");
  const auto reps = representatives(T);
  double lambda1 = std::numeric_limits<double>::infinity();
  for (const auto& B : reps) lambda1 = std::min(lambda1, lambda_tilde1(pn, pa, M, T, B, family));
  BayesResult best;
  bool have = false;
  for (double lambda2 : lambda2_grid) {
    if (!(lambda2 > 0.0)) throw std::invalid_argument("lambda2 must be positive");
    if (!(lambda2 < lambda1)) continue;
    double omega = std::numeric_limits<double>::infinity();
    for (const auto& B : reps) omega = std::min(omega, exp_omega_set(lambda2, pn, pa, M, B, T, family, settings).value);
    const double v = std::min(lambda1, omega);
    if (!have || v > best.value) {
      best = {v, 0.0, lambda1, lambda2};
      have = true;
    }
  }
  return best;
}

}  // namespace outlier
