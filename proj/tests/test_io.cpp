#include "outlier/config.hpp"
#include "outlier/exponent_report.hpp"
#include "outlier/reference.hpp"
#include "outlier/report_io.hpp"

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

using namespace outlier;
namespace fs = std::filesystem;

namespace {

Distribution B(double p) { return Distribution::bernoulli(p); }

const char* kValidYaml = R"(schema_version: 1
experiment:
  regime: est-atmost-one
  M: 4
  lambda1: 0.001
  lambda2: 0.0005
distributions:
  nominal: [0.72, 0.28]
  anomalous: [0.75, 0.25]
truth: [1]
monte_carlo:
  trials: 50
  seed: 7
  sweep: [20, 40]
compare:
  fixed_regime: fix-zwh-one
  lambda2_grid: [0.001]
  candidate_family: same-size
)";

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  if (at == std::string::npos) throw std::logic_error("pattern not found: " + from);
  return s.replace(at, from.size(), to);
}

int config_error_line(const std::string& yaml) {
  try {
    parse_run_config(yaml);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

SimulationReport small_report(int workers = 1) {
  ExperimentConfig c = parse_run_config(kValidYaml).experiment;
  return run_experiment(c, workers);
}

struct CliResult {
  int code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(OUTLIER_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed");
  CliResult r;
  std::array<char, 512> buf{};
  while (fgets(buf.data(), buf.size(), pipe)) r.out += buf.data();
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("outlier_io_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

const std::string kConfigs = std::string(OUTLIER_SOURCE_DIR) + "/configs/";

}  // namespace

// ---- distributions --------------------------------------------------------

TEST(ParseDistribution, AcceptsAndRenormalizes) {
  const auto d = parse_distribution("0.7, 0.3");
  EXPECT_EQ(d, B(0.3));
  const auto e = parse_distribution("0.2,0.3,0.5000000001");
  EXPECT_NEAR(e[0] + e[1] + e[2], 1.0, 1e-15);
  EXPECT_NEAR(e[2], 0.5000000001 / 1.0000000001, 1e-15);
}

TEST(ParseDistribution, RejectsBadInput) {
  EXPECT_THROW(parse_distribution("0.5,0.6"), std::invalid_argument);
  EXPECT_THROW(parse_distribution("1.0"), std::invalid_argument);
  EXPECT_THROW(parse_distribution("0.5,abc"), std::invalid_argument);
  EXPECT_THROW(parse_distribution("0.5,,0.5"), std::invalid_argument);
  EXPECT_THROW(parse_distribution("1.2,-0.2"), std::invalid_argument);
  EXPECT_THROW(distribution_from_values({0.5, std::nan("")}), std::invalid_argument);
}

TEST(FormatDouble, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 8.54e-4, 123456.789, 0.0}) EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_double(0.1), "0.1");
}

// ---- configuration --------------------------------------------------------

TEST(Config, ParsesValidDocument) {
  const RunConfig rc = parse_run_config(kValidYaml);
  const auto& c = rc.experiment;
  EXPECT_EQ(c.test.regime, Regime::est_atmost_one);
  EXPECT_EQ(c.test.M, 4);
  EXPECT_EQ(c.test.T, 1);
  EXPECT_EQ(c.test.lambda1, 0.001);
  EXPECT_EQ(c.test.lambda2, 0.0005);
  EXPECT_EQ(c.nominal, B(0.28));
  EXPECT_EQ(c.truth, Subset{0});
  EXPECT_EQ(c.trials, 50);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.sweep, (std::vector<long long>{20, 40}));
  ASSERT_TRUE(rc.compare.has_value());
  EXPECT_EQ(rc.compare->fixed_regime, Regime::fix_zwh_one);
  EXPECT_EQ(rc.compare->lambda2_grid, std::vector<double>{0.001});
  EXPECT_EQ(rc.compare->family, CandidateFamily::same_size);
}

TEST(Config, ErrorsCarryLineNumbers) {
  const std::string y = kValidYaml;
  EXPECT_EQ(config_error_line(replace(y, "  M: 4\n", "  M: 4\n  bogus: 1\n")), 5);
  EXPECT_EQ(config_error_line(replace(y, "est-atmost-one", "est-sideways")), 3);
  EXPECT_EQ(config_error_line(replace(y, "[0.72, 0.28]", "[0.72, 0.38]")), 8);
  EXPECT_EQ(config_error_line(replace(y, "truth: [1]", "truth: [9]")), 10);
  EXPECT_EQ(config_error_line(replace(y, "trials: 50", "trials: many")), 12);
  EXPECT_EQ(config_error_line(replace(y, "schema_version: 1", "schema_version: 2")), 1);
  EXPECT_EQ(config_error_line(replace(y, "fix-zwh-one", "est-exact-one")), 16);
  EXPECT_GT(config_error_line(replace(y, "candidate_family: same-size", "candidate_family: some")), 0);
  EXPECT_GT(config_error_line(replace(y, "  M: 4\n", "  M: [4\n")), 0);
}

TEST(Config, InvalidThresholdsAndMissingSections) {
  const std::string y = kValidYaml;
  // Lower threshold above the upper one.
  EXPECT_THROW(parse_run_config(replace(y, "lambda2: 0.0005", "lambda2: 0.005")), ConfigError);
  EXPECT_THROW(parse_run_config(replace(y, "truth: [1]\n", "")), ConfigError);
  EXPECT_THROW(parse_run_config(replace(y, "monte_carlo:\n  trials: 50\n  seed: 7\n  sweep: [20, 40]\n", "")),
               ConfigError);
  EXPECT_THROW(parse_run_config("just text"), ConfigError);
  EXPECT_THROW(load_run_config("/nonexistent/config.yaml"), ConfigError);
}

TEST(Config, ShippedConfigsLoad) {
  for (const char* name : {"est_exact_one.yaml", "est_atmost_one.yaml", "compare_atmost_one.yaml", "compare_atmost_T.yaml"})
    EXPECT_NO_THROW(load_run_config(kConfigs + name)) << name;
}

// ---- reports --------------------------------------------------------------

TEST(Report, JsonRoundTrip) {
  const auto r = small_report();
  const std::string text = write_report_json(r);
  const auto back = read_report_json(text);
  EXPECT_EQ(back, r);
  EXPECT_EQ(write_report_json(back), text);
  const auto j = ordered_json::parse(text);
  EXPECT_EQ(j.at("schema_version"), kSchemaVersion);
  EXPECT_EQ(j.begin().key(), "schema_version");
  EXPECT_EQ(text.back(), '\n');
}

TEST(Report, ConfigJsonRoundTrip) {
  const auto c = parse_run_config(kValidYaml).experiment;
  EXPECT_EQ(experiment_config_from_json(to_json(c)), c);
}

TEST(Report, ByteIdenticalAcrossWorkerCounts) {
  EXPECT_EQ(write_report_json(small_report(1)), write_report_json(small_report(8)));
  EXPECT_EQ(write_table_csv(small_report(1)), write_table_csv(small_report(8)));
}

TEST(Report, CsvLayout) {
  const auto r = small_report();
  const std::string csv = write_table_csv(r);
  std::istringstream in(csv);
  std::string header, row;
  std::getline(in, header);
  EXPECT_EQ(header,
            "n,hypothesis,trials,errors_by_class,error_prob,wilson_hi,mean_tau,tau_se,exponent_estimate,theory_exponent");
  int rows = 0;
  while (std::getline(in, row)) {
    ++rows;
    EXPECT_EQ(row.find('\r'), std::string::npos);
    EXPECT_NE(row.find(",H_{1},50,misclassified="), std::string::npos) << row;
  }
  EXPECT_EQ(rows, 2);
  // A hypothesis holding a comma is quoted.
  auto multi = r;
  multi.points.front().hypothesis = "H_{1,2}";
  EXPECT_NE(write_table_csv(multi).find(",\"H_{1,2}\","), std::string::npos);
}

TEST(Report, RejectsForeignSchema) {
  auto j = ordered_json::parse(write_report_json(small_report()));
  j["schema_version"] = "2";
  EXPECT_THROW(simulation_report_from_json(j), std::exception);
}

// ---- exponent tables ------------------------------------------------------

TEST(ExponentReport, ExactOneEntries) {
  ExponentQuery q;
  q.regime = Regime::est_exact_one;
  q.M = 3;
  q.pn = B(0.2);
  q.pa = B(0.4);
  const auto r = exponent_report(q);
  ASSERT_EQ(r.entries.size(), 1u);
  EXPECT_EQ(r.entries[0].name, "misclassification");
  EXPECT_NEAR(r.entries[0].value, 0.0493, 1e-4);
  const auto j = to_json(r);
  EXPECT_EQ(j.at("schema_version"), kSchemaVersion);
  EXPECT_EQ(j.at("regime"), "est-exact-one");
}

TEST(ExponentReport, AtMostEntriesAndMissingThresholds) {
  ExponentQuery q;
  q.regime = Regime::est_atmost_one;
  q.M = 4;
  q.pn = B(0.25);
  q.pa = B(0.28);
  EXPECT_THROW(exponent_report(q), std::invalid_argument);
  q.lambda1 = 9e-4;
  q.lambda2 = 1e-4;
  const auto r = exponent_report(q);
  ASSERT_FALSE(r.entries.empty());
  EXPECT_EQ(r.entries.back().name, "bayesian");
  double smallest = 1e300;
  for (const auto& e : r.entries)
    if (e.name.rfind("lambda_tilde1", 0) != 0) smallest = std::min(smallest, e.value);
  EXPECT_EQ(r.entries.back().value, smallest);
  EXPECT_NEAR(r.entries.back().value, 8.54e-4, 0.05 * 8.54e-4);
}

// ---- reference expectations -----------------------------------------------

TEST(Reference, LoadsAndTolerances) {
  const auto refs = load_reference_values(default_reference_path());
  EXPECT_GE(refs.size(), 10u);
  for (const auto& r : refs) {
    EXPECT_FALSE(r.id.empty());
    EXPECT_GT(r.tolerance, 0.0);
  }
  EXPECT_TRUE(within_tolerance(0.0498, 0.0493, 1e-3, false));
  EXPECT_FALSE(within_tolerance(0.0504, 0.0493, 1e-3, false));
  EXPECT_TRUE(within_tolerance(8.9e-4, 8.54e-4, 0.05, true));
  EXPECT_FALSE(within_tolerance(9.0e-4, 8.54e-4, 0.05, true));
  const auto c1 = run_reference_checks(default_reference_path(), 1);
  EXPECT_EQ(c1.size(), 6u);
  for (const auto& c : c1) EXPECT_TRUE(c.pass) << c.id;
  EXPECT_THROW(load_reference_values("/nonexistent.json"), std::exception);
}

// ---- command line ---------------------------------------------------------

TEST(Cli, ExponentTable) {
  auto r = run_cli("exponent --regime est-exact-one --M 3 --pn 0.8,0.2 --pa 0.6,0.4");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("0.0493"), std::string::npos) << r.out;
  r = run_cli("exponent --regime ep-exact-one --M 4 --pn 0.8,0.2 --pa 0.6,0.4");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("0.0659"), std::string::npos) << r.out;
  r = run_cli("exponent --regime est-exact-one --M 4 --pn 0.7,0.3 --pa 0.7,0.3");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("0.0000"), std::string::npos) << r.out;
}

TEST(Cli, UsageAndConfigErrors) {
  EXPECT_EQ(run_cli("exponent --regime est-exact-one --M 3 --pn 0.8,0.3 --pa 0.6,0.4").code, 1);
  EXPECT_EQ(run_cli("frobnicate").code, 1);
  const auto dir = scratch_dir("cfg");
  std::ofstream(dir / "bad.yaml") << replace(kValidYaml, "  M: 4\n", "  M: 4\n  bogus: 1\n");
  const auto r = run_cli("simulate --config " + (dir / "bad.yaml").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("line 5"), std::string::npos) << r.out;
  EXPECT_EQ(run_cli("simulate --config " + (dir / "missing.yaml").string()).code, 2);
}

TEST(Cli, CheckExitCodes) {
  const auto dir = scratch_dir("check");
  const char* entry = R"({"version": 1, "values": [
    {"id": "ld", "description": "", "quantity": "exp_ld",
     "args": {"pn": [0.7, 0.3], "pa": [0.9, 0.1], "M": 5, "T": 2},
     "expected": EXPECTED, "tolerance": 5e-4, "tolerance_kind": "absolute", "criterion": 3}]})";
  std::ofstream(dir / "good.json") << replace(entry, "EXPECTED", "0.0855");
  std::ofstream(dir / "bad.json") << replace(entry, "EXPECTED", "0.0955");
  auto r = run_cli("exponent --check-paper --expectations " + (dir / "good.json").string());
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("PASS ld"), std::string::npos);
  r = run_cli("exponent --check-paper --expectations " + (dir / "bad.json").string());
  EXPECT_EQ(r.code, 3) << r.out;
  EXPECT_NE(r.out.find("FAIL ld"), std::string::npos);
}

TEST(Cli, SimulateWritesStableOutputs) {
  const auto dir = scratch_dir("sim");
  std::ofstream(dir / "run.yaml") << kValidYaml;
  const std::string base = "simulate --config " + (dir / "run.yaml").string() + " --seed 3 --trials 40";
  auto a = run_cli(base + " --threads 1 --out-json " + (dir / "a.json").string() + " --out-csv " +
                   (dir / "a.csv").string());
  ASSERT_EQ(a.code, 0) << a.out;
  auto b = run_cli(base + " --threads 8 --out-json " + (dir / "b.json").string() + " --out-csv " +
                   (dir / "b.csv").string());
  ASSERT_EQ(b.code, 0) << b.out;
  EXPECT_EQ(slurp(dir / "a.json"), slurp(dir / "b.json"));
  EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
  const auto report = read_report_json(slurp(dir / "a.json"));
  EXPECT_EQ(report.config.seed, 3u);
  EXPECT_EQ(report.config.trials, 40);
}

TEST(Cli, SimulateTruncationExitCode) {
  const auto dir = scratch_dir("trunc");
  std::string y = replace(kValidYaml, "lambda1: 0.001", "lambda1: 50");
  y = replace(y, "lambda2: 0.0005", "lambda2: 0.000000001\n  k_max: 30");
  y = replace(y, "sweep: [20, 40]", "sweep: [10]");
  std::ofstream(dir / "trunc.yaml") << y;
  EXPECT_EQ(run_cli("simulate --config " + (dir / "trunc.yaml").string()).code, 4);
}

TEST(Cli, LdCurve) {
  auto r = run_cli("ldb-curve --M 5 --pn 0.7,0.3 --pa 0.7,0.3");
  ASSERT_EQ(r.code, 0) << r.out;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "T,ld,t");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(line.substr(line.find(',') + 1, 2), "0,");
  }
  EXPECT_EQ(rows, 2);
  EXPECT_EQ(run_cli("ldb-curve --M 2 --pn 0.7,0.3 --pa 0.9,0.1").code, 1);
}

TEST(Cli, CompareReportsBothExponents) {
  const auto r = run_cli("compare --config " + kConfigs + "compare_atmost_one.yaml --threads 4");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("8.54"), std::string::npos) << r.out;
}
