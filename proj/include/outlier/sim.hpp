#pragma once

#include "outlier/detectors.hpp"
#include "outlier/exponents.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace outlier {

struct ExperimentConfig {
  TestConfig test;  // test.n is replaced by each sweep value
  Distribution nominal = Distribution::bernoulli(0.5);
  Distribution anomalous = Distribution::bernoulli(0.5);
  Subset truth;  // empty: no outliers
  long long trials = 1;
  std::uint64_t seed = 0;
  std::vector<long long> sweep;

  void validate() const;
  // pa on the truth rows, pn elsewhere.
  std::vector<Distribution> rows() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

enum class Outcome : std::uint8_t { correct, misclassified, false_reject, false_alarm, truncated };

Outcome classify(const Verdict& v, const Subset& truth);

struct OutcomeCounts {
  long long correct = 0;
  long long misclassified = 0;
  long long false_reject = 0;
  long long false_alarm = 0;
  long long truncated = 0;

  long long errors() const { return misclassified + false_reject + false_alarm; }
  long long total() const { return correct + errors() + truncated; }
  friend bool operator==(const OutcomeCounts&, const OutcomeCounts&) = default;
};

struct Rate {
  double p = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const Rate&, const Rate&) = default;
};

// Wilson score interval at 95%.
Rate wilson(long long successes, long long trials);

struct SweepPoint {
  long long n = 0;
  std::string hypothesis;
  long long trials = 0;
  OutcomeCounts counts;
  Rate misclassification, false_reject, false_alarm, truncation;
  double error_prob = 0.0;  // Wilson upper bound when no error was seen
  double wilson_hi = 0.0;
  bool zero_errors = false;
  double mean_tau = 0.0;
  double tau_se = 0.0;
  double exponent_estimate = 0.0;  // -ln(error_prob) / mean_tau
  bool exponent_is_lower_bound = false;
  double theory_exponent = 0.0;

  friend bool operator==(const SweepPoint&, const SweepPoint&) = default;
};

struct SimulationReport {
  ExperimentConfig config;
  std::vector<SweepPoint> points;

  double truncated_fraction() const;
  friend bool operator==(const SimulationReport&, const SimulationReport&) = default;
};

// Asymptotic exponent of the total error probability for the configured
// regime and truth.
double theory_exponent(const ExperimentConfig& cfg, const SimplexOptimizerSettings& settings = {});

SimulationReport run_experiment(const ExperimentConfig& cfg, int workers = 1);

struct UniversalityRow {
  Distribution nominal = Distribution::bernoulli(0.5);
  Distribution anomalous = Distribution::bernoulli(0.5);
  long long n = 0;
  double mean_tau = 0.0;
  double tau_se = 0.0;
  bool pass = false;  // mean tau - 2 se <= n
};

// Mean stopping time against n for every pair; base.sweep must hold one n.
std::vector<UniversalityRow> estimate_universality(
    const ExperimentConfig& base, const std::vector<std::pair<Distribution, Distribution>>& pairs, int workers = 1);

struct ComparisonRow {
  long long n = 0;
  double sequential_mean_tau = 0.0;
  long long fixed_length = 0;
  double sequential_error = 0.0;
  double fixed_error = 0.0;
  double sequential_exponent = 0.0;
  double fixed_exponent = 0.0;
};

// Runs the sequential configuration, then the fixed-length regime with its
// length set to the rounded sequential mean stopping time.
std::vector<ComparisonRow> compare_tests(const ExperimentConfig& sequential, Regime fixed_regime, int workers = 1);

}  // namespace outlier
