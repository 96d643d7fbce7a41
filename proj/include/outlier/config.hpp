#pragma once

#include "outlier/exponents.hpp"
#include "outlier/report_io.hpp"
#include "outlier/sim.hpp"

#include <optional>
#include <string>
#include <vector>

namespace outlier {

// Settings of the `compare` command on top of the experiment block.
struct CompareSettings {
  std::optional<Regime> fixed_regime;  // Monte Carlo columns when set
  std::vector<double> lambda2_grid{1e-3, 1e-4};
  CandidateFamily family = CandidateFamily::no_supersets;
};

struct RunConfig {
  ExperimentConfig experiment;
  std::optional<CompareSettings> compare;
};

// YAML document:
//
//   schema_version: 1
//   experiment:
//     regime: est-exact-one
//     M: 4
//     T: 1                       # optional, default 1
//     beta / lambda1 / lambda2 / lambda / k_max   # as the regime needs
//   distributions:
//     nominal: [0.72, 0.28]
//     anomalous: [0.75, 0.25]
//   truth: [1]                   # 1-based rows; [] for no outliers
//   monte_carlo:
//     trials: 10000
//     seed: 7
//     sweep: [200, 400, 800, 1600]
//   compare:                     # optional
//     fixed_regime: fix-lnv-one
//     lambda2_grid: [0.001, 0.0001]
//     candidate_family: no-supersets
//
// Unknown keys are rejected. Throws ConfigError with the offending line.
RunConfig parse_run_config(const std::string& yaml_text);
RunConfig load_run_config(const std::string& path);

}  // namespace outlier
