#include "outlier/sim.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

using namespace outlier;

namespace {

Distribution B(double p) { return Distribution::bernoulli(p); }

constexpr double kZ = 1.959963984540054;

ExperimentConfig est_config(double pn, double pa, std::vector<long long> sweep, long long trials, std::uint64_t seed) {
  ExperimentConfig c;
  c.test.regime = Regime::est_exact_one;
  c.test.M = 4;
  c.nominal = B(pn);
  c.anomalous = B(pa);
  c.truth = Subset{1};
  c.trials = trials;
  c.seed = seed;
  c.sweep = std::move(sweep);
  c.test.n = c.sweep.front();
  return c;
}

Verdict verdict(HypothesisLabel label, bool truncated = false) {
  Verdict v;
  v.label = label;
  v.truncated = truncated;
  return v;
}

}  // namespace

TEST(Wilson, KnownIntervals) {
  // With no successes the upper end is z^2 / (n + z^2).
  const Rate none = wilson(0, 10);
  EXPECT_EQ(none.p, 0.0);
  EXPECT_EQ(none.lo, 0.0);
  EXPECT_NEAR(none.hi, kZ * kZ / (10.0 + kZ * kZ), 1e-15);
  const Rate half = wilson(5, 10);
  EXPECT_NEAR(half.lo, 0.236593, 1e-6);
  EXPECT_NEAR(half.hi, 0.763407, 1e-6);
  const Rate all = wilson(10, 10);
  EXPECT_NEAR(all.hi, 1.0, 1e-15);
  EXPECT_NEAR(all.lo, 1.0 - none.hi, 1e-12);
  EXPECT_THROW(wilson(0, 0), std::invalid_argument);
}

TEST(Classify, OutcomeMapping) {
  const Subset truth{1};
  EXPECT_EQ(classify(verdict(HypothesisLabel::outliers(Subset{1})), truth), Outcome::correct);
  EXPECT_EQ(classify(verdict(HypothesisLabel::outliers(Subset{2})), truth), Outcome::misclassified);
  EXPECT_EQ(classify(verdict(HypothesisLabel::outliers(Subset{1, 2})), truth), Outcome::misclassified);
  EXPECT_EQ(classify(verdict(HypothesisLabel::null()), truth), Outcome::false_reject);
  EXPECT_EQ(classify(verdict(HypothesisLabel::null()), Subset()), Outcome::correct);
  EXPECT_EQ(classify(verdict(HypothesisLabel::outliers(Subset{0})), Subset()), Outcome::false_alarm);
  // A truncated run is never counted as correct, whatever its label.
  EXPECT_EQ(classify(verdict(HypothesisLabel::outliers(Subset{1}), true), truth), Outcome::truncated);
  EXPECT_EQ(classify(verdict(HypothesisLabel::null(), true), Subset()), Outcome::truncated);
}

TEST(Experiment, ValidateRejectsBadConfigs) {
  const auto good = est_config(0.2, 0.4, {10}, 5, 1);
  EXPECT_NO_THROW(good.validate());
  auto c = good;
  c.trials = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = good;
  c.sweep.clear();
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = good;
  c.truth = Subset{5};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = good;
  c.truth = Subset{0, 1};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = good;
  c.nominal = Distribution::uniform(3);
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_THROW(run_experiment(c), std::invalid_argument);
}

TEST(Experiment, RowsPlaceAnomalousOnTruth) {
  const auto c = est_config(0.2, 0.4, {10}, 5, 1);
  const auto rows = c.rows();
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[1], B(0.4));
  EXPECT_EQ(rows[0], B(0.2));
  EXPECT_EQ(rows[3], B(0.2));
}

TEST(Experiment, OutcomesPartitionTrials) {
  const auto r = run_experiment(est_config(0.2, 0.4, {5, 20, 60}, 300, 3), 4);
  ASSERT_EQ(r.points.size(), 3u);
  for (const auto& p : r.points) {
    EXPECT_EQ(p.trials, 300);
    EXPECT_EQ(p.counts.total(), 300);
    EXPECT_EQ(p.counts.false_reject, 0);
    EXPECT_EQ(p.counts.false_alarm, 0);
    EXPECT_EQ(p.hypothesis, "H_{2}");
    EXPECT_GE(p.mean_tau, static_cast<double>(p.n - 1));
    EXPECT_NEAR(p.theory_exponent, exp_est_exact_one(B(0.2), B(0.4), 4), 1e-15);
    EXPECT_EQ(p.misclassification, wilson(p.counts.misclassified, p.trials));
  }
  EXPECT_EQ(r.points[0].n, 5);
  EXPECT_EQ(r.points[2].n, 60);
}

TEST(Experiment, SingleTrial) {
  const auto r = run_experiment(est_config(0.2, 0.4, {10}, 1, 9), 8);
  ASSERT_EQ(r.points.size(), 1u);
  EXPECT_EQ(r.points[0].counts.total(), 1);
  EXPECT_EQ(r.points[0].tau_se, 0.0);
}

TEST(Experiment, DeterministicAcrossWorkerCounts) {
  const auto c = est_config(0.25, 0.28, {20, 40}, 400, 20240611);
  const auto one = run_experiment(c, 1);
  EXPECT_EQ(one, run_experiment(c, 8));
  EXPECT_EQ(one, run_experiment(c, 3));
  auto other = c;
  other.seed = c.seed + 1;
  EXPECT_NE(one.points, run_experiment(other, 1).points);
}

TEST(Experiment, ZeroErrorsReportWilsonUpperBound) {
  const auto r = run_experiment(est_config(0.1, 0.9, {40}, 500, 5), 4);
  const auto& p = r.points.front();
  ASSERT_EQ(p.counts.errors(), 0);
  EXPECT_TRUE(p.zero_errors);
  EXPECT_TRUE(p.exponent_is_lower_bound);
  EXPECT_NEAR(p.error_prob, kZ * kZ / (500.0 + kZ * kZ), 1e-15);
  EXPECT_EQ(p.error_prob, p.wilson_hi);
  EXPECT_NEAR(p.exponent_estimate, -std::log(p.error_prob) / p.mean_tau, 1e-15);
}

TEST(Experiment, ErrorFallsWithLength) {
  const auto r = run_experiment(est_config(0.2, 0.4, {10, 40, 160}, 3000, 17), 4);
  EXPECT_GT(r.points[0].error_prob, r.points[1].error_prob);
  EXPECT_GT(r.points[1].error_prob, r.points[2].error_prob);
}

TEST(Experiment, NullTruthGivesOnlyFalseAlarms) {
  ExperimentConfig c;
  c.test.regime = Regime::est_atmost_one;
  c.test.M = 4;
  c.test.lambda1 = 0.01;
  c.test.lambda2 = 0.005;
  c.nominal = c.anomalous = B(0.3);
  c.trials = 300;
  c.seed = 2;
  c.sweep = {50};
  const auto r = run_experiment(c, 4);
  const auto& p = r.points.front();
  EXPECT_EQ(p.hypothesis, "H_r");
  EXPECT_EQ(p.counts.misclassified, 0);
  EXPECT_EQ(p.counts.false_reject, 0);
  EXPECT_EQ(p.counts.total(), 300);
  EXPECT_EQ(p.theory_exponent, 0.01);
}

TEST(Experiment, TruncationIsCountedSeparately) {
  // A first threshold far above any attainable score leaves two ends: the
  // cap, or a column where all types agree and the null is declared.
  ExperimentConfig c;
  c.test.regime = Regime::est_atmost_one;
  c.test.M = 4;
  c.test.lambda1 = 50.0;
  c.test.lambda2 = 1e-9;
  c.test.k_max = 30;
  c.nominal = B(0.3);
  c.anomalous = B(0.6);
  c.truth = Subset{0};
  c.trials = 200;
  c.seed = 4;
  c.sweep = {10};
  const auto r = run_experiment(c, 2);
  const auto& k = r.points.front().counts;
  EXPECT_GT(k.truncated, 100);
  EXPECT_EQ(k.correct, 0);
  EXPECT_EQ(k.truncated + k.false_reject, 200);
  EXPECT_DOUBLE_EQ(r.truncated_fraction(), static_cast<double>(k.truncated) / 200.0);
}

TEST(Universality, RejectsNonEstRegimesAndMultipleLengths) {
  auto c = est_config(0.2, 0.4, {30}, 10, 1);
  c.test.regime = Regime::ep_exact_one;
  EXPECT_THROW(estimate_universality(c, {{B(0.2), B(0.4)}}), std::invalid_argument);
  auto d = est_config(0.2, 0.4, {30, 60}, 10, 1);
  EXPECT_THROW(estimate_universality(d, {{B(0.2), B(0.4)}}), std::invalid_argument);
}

TEST(Universality, MeanStoppingTimeWithinBudget) {
  const auto rows = estimate_universality(est_config(0.5, 0.5, {60}, 400, 8),
                                          {{B(0.3), B(0.3)}, {B(0.2), B(0.4)}, {B(0.1), B(0.9)}}, 4);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.n, 60);
    EXPECT_TRUE(r.pass) << r.mean_tau;
    EXPECT_EQ(r.pass, r.mean_tau - 2.0 * r.tau_se <= 60.0);
  }
}

TEST(Compare, RegimeChecksAndMatchedLengths) {
  auto seq = est_config(0.2, 0.4, {20, 40}, 200, 6);
  EXPECT_THROW(compare_tests(seq, Regime::est_exact_one), std::invalid_argument);
  auto fixed = seq;
  fixed.test.regime = Regime::fix_lnv_one;
  EXPECT_THROW(compare_tests(fixed, Regime::fix_lnv_one), std::invalid_argument);
  const auto rows = compare_tests(seq, Regime::fix_lnv_one, 4);
  const auto ref = run_experiment(seq, 1);
  ASSERT_EQ(rows.size(), 2u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].n, seq.sweep[i]);
    EXPECT_EQ(rows[i].sequential_mean_tau, ref.points[i].mean_tau);
    EXPECT_EQ(rows[i].fixed_length, std::llround(ref.points[i].mean_tau));
    EXPECT_GE(rows[i].fixed_error, 0.0);
    EXPECT_LE(rows[i].fixed_error, 1.0);
  }
}

TEST(Theory, ExponentPerRegime) {
  auto c = est_config(0.2, 0.4, {10}, 1, 1);
  EXPECT_EQ(theory_exponent(c), exp_est_exact_one(B(0.2), B(0.4), 4));
  c.test.regime = Regime::ep_exact_one;
  EXPECT_EQ(theory_exponent(c), exp_ep_exact_one(B(0.2), B(0.4), 4));
  c.test.regime = Regime::fix_zwh_one;
  c.test.lambda = 10.0;
  // With a very large threshold the false-reject term vanishes.
  EXPECT_EQ(theory_exponent(c), 0.0);
}
