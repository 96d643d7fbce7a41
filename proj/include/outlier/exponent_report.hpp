#pragma once

#include "outlier/detectors.hpp"
#include "outlier/exponents.hpp"
#include "outlier/report_io.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace outlier {

struct ExponentEntry {
  std::string name;
  double value = 0.0;
  std::map<std::string, std::string> arguments;  // minimizers and thresholds, display form
};

struct ExponentReport {
  std::string regime;
  int M = 0;
  int T = 1;
  std::vector<ExponentEntry> entries;
};

struct ExponentQuery {
  Regime regime = Regime::est_exact_one;
  int M = 3;
  int T = 1;
  Distribution pn = Distribution::bernoulli(0.5);
  Distribution pa = Distribution::bernoulli(0.5);
  std::optional<double> lambda;   // fixed-length rejection threshold
  std::optional<double> lambda1;  // sequential thresholds
  std::optional<double> lambda2;
  CandidateFamily family = CandidateFamily::no_supersets;
};

// Every exponent attached to the regime's error classes.
ExponentReport exponent_report(const ExponentQuery& q, const SimplexOptimizerSettings& settings = {});

ordered_json to_json(const ExponentReport& r);

}  // namespace outlier
