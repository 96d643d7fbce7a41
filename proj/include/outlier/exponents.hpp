#pragma once

#include "outlier/divergence.hpp"
#include "outlier/scoring.hpp"

#include <string>
#include <vector>

namespace outlier {

// ---- closed forms ----------------------------------------------------------

double exp_ep_exact_one(const Distribution& pn, const Distribution& pa, int M);
double exp_est_exact_one(const Distribution& pn, const Distribution& pa, int M);

struct LdResult {
  double value = 0.0;
  int t = 0;  // minimizing t in {0, ..., T-1}
};
LdResult exp_ld(const Distribution& pn, const Distribution& pa, int M, int T);

// ---- constrained KL-sum minimization ---------------------------------------

struct SimplexOptimizerSettings {
  double coarse_step = 0.02;
  int refinement_rounds = 4;
  double shrink = 0.1;
  double tolerance = 1e-13;              // minimum objective decrease accepted as a move
  long long max_coarse_points = 20000;   // coarse step is widened until the grid fits
  int starts = 4;                        // separated coarse points refined independently

  void validate() const;
};

// Constraint on a full tuple Q = (Q_0, ..., Q_{M-1}).
struct TupleConstraint {
  enum class Kind {
    set_at_most,   // g_set(Q, C) <= lambda
    li_dominates,  // g_li_set(Q, B) >= g_li_set(Q, C)
  };
  Kind kind = Kind::set_at_most;
  Subset C;
  Subset B;
  double lambda = 0.0;

  static TupleConstraint at_most(Subset C, double lambda) { return {Kind::set_at_most, C, Subset(), lambda}; }
  static TupleConstraint dominates(Subset B, Subset C) { return {Kind::li_dominates, C, B, 0.0}; }
};

// Minimize sum_j D(Q_j || targets[j]) subject to every constraint.
struct TupleProblem {
  std::vector<Distribution> targets;
  std::vector<TupleConstraint> constraints;

  int M() const { return static_cast<int>(targets.size()); }
  bool feasible(const std::vector<Distribution>& Q) const;
  double objective(const std::vector<Distribution>& Q) const;
};

// Reduced problem over classes of interchangeable positions. Each class holds
// one distribution; the objective is sum_c sum_terms weight * D(Q_c || target),
// and a block is a multiset of classes whose g-term is
// sum_c m_c * D(Q_c || sum_c m_c Q_c / sum_c m_c).
struct ReducedProblem {
  struct Term {
    double weight;
    Distribution target;
  };
  struct Block {
    std::vector<int> multiplicity;  // per class
  };
  struct Constraint {
    std::vector<Block> lhs;
    std::vector<Block> rhs;  // used by the dominance form only
    double lambda = 0.0;
    bool dominance = false;  // lhs >= rhs, otherwise lhs <= lambda
  };

  int alphabet_size = 2;
  std::vector<std::vector<Term>> classes;
  std::vector<Constraint> constraints;
  std::vector<int> class_of_position;  // filled when reduced from a TupleProblem

  // Canonical text key; equal keys describe the same optimization.
  std::string key() const;
};

// Groups positions by (target, membership in every constrained subset).
ReducedProblem reduce(const TupleProblem& problem);

struct KlSumResult {
  bool feasible = false;
  double value = 0.0;
  std::vector<Distribution> argmin;  // one per class (reduced) or per position (tuple)
};

KlSumResult minimize_kl_sum(const ReducedProblem& problem, const SimplexOptimizerSettings& settings = {});
KlSumResult minimize_kl_sum(const TupleProblem& problem, const SimplexOptimizerSettings& settings = {});

// Exhaustive grid over all M binary positions, no symmetry reduction.
KlSumResult brute_force_tuple_oracle(const TupleProblem& problem, double grid_step);

// ---- optimization-based exponents ------------------------------------------

// Which competing sets enter the at-most-T exponents for a true set B.
enum class CandidateFamily {
  all,           // every C in S other than B
  no_supersets,  // additionally drop strict supersets of B
  same_size,     // only |C| = |B|
};

std::string_view to_string(CandidateFamily f);

// Competing sets C for the true set B (B itself excluded).
std::vector<Subset> competing_sets(int M, int T, const Subset& B, CandidateFamily family);

struct ConstrainedExponent {
  double value = 0.0;
  Subset C;  // minimizing competing set
  Subset D;  // second set for the two-constraint forms
  std::vector<Distribution> argmin;
};

ConstrainedExponent exp_omega_one(double lambda, const Distribution& pn, const Distribution& pa, int M,
                                  const SimplexOptimizerSettings& settings = {});
ConstrainedExponent exp_omega_set(double lambda, const Distribution& pn, const Distribution& pa, int M,
                                  const Subset& B, int T, CandidateFamily family = CandidateFamily::no_supersets,
                                  const SimplexOptimizerSettings& settings = {});
ConstrainedExponent exp_l_one(double lambda, const Distribution& pn, const Distribution& pa, int M,
                              const SimplexOptimizerSettings& settings = {});
ConstrainedExponent exp_l_set(double lambda, const Distribution& pn, const Distribution& pa, int M,
                              const Subset& B, int T, CandidateFamily family = CandidateFamily::no_supersets,
                              const SimplexOptimizerSettings& settings = {});

double lambda_tilde1(const Distribution& pn, const Distribution& pa, int M, int T, const Subset& B,
                     CandidateFamily family = CandidateFamily::no_supersets);

ConstrainedExponent exp_fixed_lnv_one(const Distribution& pn, const Distribution& pa, int M,
                                      const SimplexOptimizerSettings& settings = {});
ConstrainedExponent exp_fixed_lnv_T(const Distribution& pn, const Distribution& pa, int M, int T,
                                    const SimplexOptimizerSettings& settings = {});

struct BayesResult {
  double value = 0.0;
  double lambda = 0.0;   // fixed-length threshold
  double lambda1 = 0.0;  // sequential thresholds
  double lambda2 = 0.0;
};

// max over lambda of min(lambda, L(lambda)), L minimized over one true set per size.
BayesResult bayes_fixed(const Distribution& pn, const Distribution& pa, int M, int T,
                        CandidateFamily family = CandidateFamily::no_supersets,
                        const SimplexOptimizerSettings& settings = {});

// lambda1 at its upper limit, lambda2 the best of a small grid near 0.
BayesResult bayes_seq(const Distribution& pn, const Distribution& pa, int M, int T,
                      const std::vector<double>& lambda2_grid = {1e-3, 1e-4},
                      CandidateFamily family = CandidateFamily::no_supersets,
                      const SimplexOptimizerSettings& settings = {});

}  // namespace outlier
