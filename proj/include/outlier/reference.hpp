#pragma once

#include <optional>
#include <string>
#include <vector>

namespace outlier {

// One stored expectation and its recomputed value.
struct ReferenceCheck {
  std::string id;
  std::string description;
  std::string quantity;
  double expected = 0.0;
  double tolerance = 0.0;
  bool relative = false;
  std::optional<int> criterion;
  double actual = 0.0;
  bool pass = false;
};

// Directory holding reference_values.json, fixed at build time.
std::string default_reference_path();

std::vector<ReferenceCheck> load_reference_values(const std::string& path);
// Recomputes every entry (or only those tagged with `criterion`).
std::vector<ReferenceCheck> run_reference_checks(const std::string& path, std::optional<int> criterion = std::nullopt);
bool within_tolerance(double actual, double expected, double tolerance, bool relative);

}  // namespace outlier
