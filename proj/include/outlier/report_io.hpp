#pragma once

#include "outlier/sim.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace outlier {

inline constexpr const char* kSchemaVersion = "1";

using ordered_json = nlohmann::ordered_json;

// Raised for unreadable or invalid configuration files; carries the 1-based
// line of the offending node when known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& msg, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Comma-separated probabilities; must sum to 1 within 1e-9, then renormalized.
Distribution parse_distribution(const std::string& text);
Distribution distribution_from_values(const std::vector<double>& values);

ordered_json to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_config_from_json(const ordered_json& j);
ordered_json to_json(const SimulationReport& report);
SimulationReport simulation_report_from_json(const ordered_json& j);

// Pretty-printed document with a trailing newline.
std::string write_report_json(const SimulationReport& report);
SimulationReport read_report_json(const std::string& text);

// Flat table, one row per sweep point, full precision.
std::string write_table_csv(const SimulationReport& report);

// Shortest text that reads back to the same double ("inf" for infinity).
std::string format_double(double v);

}  // namespace outlier
