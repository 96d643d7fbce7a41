#include "outlier/config.hpp"
#include "outlier/exponent_report.hpp"
#include "outlier/reference.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

using namespace outlier;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kConfig = 2, kCheckFailed = 3, kTruncated = 4 };

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

int default_threads() {
  if (const char* env = std::getenv("OUTLIER_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

// ---- exponent -------------------------------------------------------------

struct ExponentArgs {
  std::string regime;
  int M = 0;
  int T = 1;
  std::string pn, pa;
  std::optional<double> lambda, lambda1, lambda2;
  std::string family = "no-supersets";
  std::string out;
  bool check = false;
  std::string expectations;
};

CandidateFamily parse_family(const std::string& s) {
  for (auto f : {CandidateFamily::all, CandidateFamily::no_supersets, CandidateFamily::same_size})
    if (to_string(f) == s) return f;
  throw CLI::ValidationError("--family", "unknown candidate family '" + s + "'");
}

int run_checks(const std::string& path) {
  const auto checks = run_reference_checks(path);
  bool ok = true;
  for (const auto& c : checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.id << "  expected " << format_double(c.expected)
              << (c.relative ? " rel " : " abs ") << format_double(c.tolerance) << "  got " << format_double(c.actual)
              << "\n";
    ok = ok && c.pass;
  }
  std::cout << (ok ? "all checks passed" : "some checks failed") << "\n";
  return ok ? kOk : kCheckFailed;
}

int cmd_exponent(const ExponentArgs& a) {
  if (a.check) return run_checks(a.expectations.empty() ? default_reference_path() : a.expectations);
  if (a.regime.empty() || a.M == 0 || a.pn.empty() || a.pa.empty())
    throw CLI::ValidationError("exponent", "--regime, --M, --pn and --pa are required unless --check-paper is given");
  const auto regime = parse_regime(a.regime);
  if (!regime) throw CLI::ValidationError("--regime", "unknown regime '" + a.regime + "'");
  ExponentQuery q;
  q.regime = *regime;
  q.M = a.M;
  q.T = a.T;
  q.pn = parse_distribution(a.pn);
  q.pa = parse_distribution(a.pa);
  q.lambda = a.lambda;
  q.lambda1 = a.lambda1;
  q.lambda2 = a.lambda2;
  q.family = parse_family(a.family);
  const ExponentReport r = exponent_report(q);
  for (const auto& e : r.entries) {
    std::cout << e.name << "  " << fixed4(e.value);
    for (const auto& [k, v] : e.arguments) std::cout << "  " << k << "=" << v;
    std::cout << "\n";
  }
  if (!a.out.empty()) write_file(a.out, to_json(r).dump(2) + "\n");
  return kOk;
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<long long> trials;
  int threads = 0;
  std::string out_json, out_csv;
};

void print_points(const SimulationReport& r) {
  std::cout << "n  hypothesis  trials  error_prob  wilson_hi  mean_tau  exponent_estimate  theory_exponent\n";
  for (const auto& p : r.points)
    std::cout << p.n << "  " << p.hypothesis << "  " << p.trials << "  " << fixed4(p.error_prob) << "  "
              << fixed4(p.wilson_hi) << "  " << fixed4(p.mean_tau) << "  " << fixed4(p.exponent_estimate)
              << (p.exponent_is_lower_bound ? " (lower bound)" : "") << "  " << fixed4(p.theory_exponent) << "\n";
}

int cmd_simulate(const SimulateArgs& a) {
  RunConfig rc = load_run_config(a.config);
  auto& cfg = rc.experiment;
  if (a.seed) cfg.seed = *a.seed;
  if (a.trials) cfg.trials = *a.trials;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const SimulationReport r = run_experiment(cfg, a.threads > 0 ? a.threads : default_threads());
  print_points(r);
  if (!a.out_json.empty()) write_file(a.out_json, write_report_json(r));
  if (!a.out_csv.empty()) write_file(a.out_csv, write_table_csv(r));
  if (r.truncated_fraction() > 0.01) {
    std::cerr << "truncated trials: " << fixed4(r.truncated_fraction()) << " of all trials\n";
    return kTruncated;
  }
  return kOk;
}

// ---- ldb-curve ------------------------------------------------------------

struct CurveArgs {
  int M = 0;
  std::string pn, pa, out;
};

int cmd_ldb_curve(const CurveArgs& a) {
  const Distribution pn = parse_distribution(a.pn), pa = parse_distribution(a.pa);
  std::ostringstream csv;
  csv << "T,ld,t\n";
  for (int T = 1; T <= max_outliers(a.M); ++T) {
    const LdResult ld = exp_ld(pn, pa, a.M, T);
    csv << T << "," << format_double(ld.value) << "," << ld.t << "\n";
  }
  if (a.out.empty())
    std::cout << csv.str();
  else
    write_file(a.out, csv.str());
  return kOk;
}

// ---- compare --------------------------------------------------------------

struct CompareArgs {
  std::string config;
  int threads = 0;
};

int cmd_compare(const CompareArgs& a) {
  const RunConfig rc = load_run_config(a.config);
  const auto& cfg = rc.experiment;
  const CompareSettings cs = rc.compare.value_or(CompareSettings{});
  const int M = cfg.test.M, T = cfg.test.T;
  const BayesResult seq = bayes_seq(cfg.nominal, cfg.anomalous, M, T, cs.lambda2_grid, cs.family);
  const BayesResult fix = bayes_fixed(cfg.nominal, cfg.anomalous, M, T, cs.family);
  std::cout << "test  bayesian_exponent  scientific  thresholds\n";
  std::cout << "sequential  " << fixed4(seq.value) << "  " << sci(seq.value) << "  lambda1=" << sci(seq.lambda1)
            << " lambda2=" << sci(seq.lambda2) << "\n";
  std::cout << "fixed  " << fixed4(fix.value) << "  " << sci(fix.value) << "  lambda=" << sci(fix.lambda) << "\n";
  if (cs.fixed_regime) {
    const auto rows = compare_tests(cfg, *cs.fixed_regime, a.threads > 0 ? a.threads : default_threads());
    std::cout << "n  sequential_mean_tau  fixed_length  sequential_error  fixed_error  sequential_exponent  "
                 "fixed_exponent\n";
    for (const auto& r : rows)
      std::cout << r.n << "  " << fixed4(r.sequential_mean_tau) << "  " << r.fixed_length << "  "
                << fixed4(r.sequential_error) << "  " << fixed4(r.fixed_error) << "  "
                << fixed4(r.sequential_exponent) << "  " << fixed4(r.fixed_exponent) << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Outlier hypothesis detection among discrete sequences: exponents and simulations"};
  app.require_subcommand(1);

  ExponentArgs ea;
  auto* exp = app.add_subcommand("exponent", "Print theoretical error exponents for a regime");
  exp->add_option("--regime", ea.regime, "Detector regime, e.g. est-exact-one");
  exp->add_option("--M", ea.M, "Number of sequences");
  exp->add_option("--T", ea.T, "Maximum number of outliers");
  exp->add_option("--pn", ea.pn, "Nominal distribution, comma separated");
  exp->add_option("--pa", ea.pa, "Anomalous distribution, comma separated");
  exp->add_option("--lambda", ea.lambda, "Fixed-length rejection threshold");
  exp->add_option("--lambda1", ea.lambda1, "Sequential upper threshold");
  exp->add_option("--lambda2", ea.lambda2, "Sequential lower threshold");
  exp->add_option("--family", ea.family, "Competing sets: all, no-supersets, same-size");
  exp->add_option("--out", ea.out, "Write the table as JSON");
  exp->add_flag("--check-paper,--check-reference", ea.check, "Recompute the stored reference values");
  exp->add_option("--expectations", ea.expectations, "Reference values file");

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Run a Monte Carlo experiment from a YAML config");
  sim->add_option("--config", sa.config, "Experiment config")->required();
  sim->add_option("--seed", sa.seed, "Override the master seed");
  sim->add_option("--trials", sa.trials, "Override trials per sweep point");
  sim->add_option("--threads", sa.threads, "Worker threads (default OUTLIER_THREADS or 1)");
  sim->add_option("--out-json", sa.out_json, "Structured report path");
  sim->add_option("--out-csv", sa.out_csv, "Flat table path");

  CurveArgs ca;
  auto* curve = app.add_subcommand("ldb-curve", "Tabulate the exact-T closed form over T");
  curve->add_option("--M", ca.M, "Number of sequences")->required()->check(CLI::Range(3, 64));
  curve->add_option("--pn", ca.pn, "Nominal distribution")->required();
  curve->add_option("--pa", ca.pa, "Anomalous distribution")->required();
  curve->add_option("--out", ca.out, "CSV path (default stdout)");

  CompareArgs cpa;
  auto* cmp = app.add_subcommand("compare", "Bayesian exponents of the sequential and fixed-length tests");
  cmp->add_option("--config", cpa.config, "Experiment config")->required();
  cmp->add_option("--threads", cpa.threads, "Worker threads (default OUTLIER_THREADS or 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*exp) return cmd_exponent(ea);
    if (*sim) return cmd_simulate(sa);
    if (*curve) return cmd_ldb_curve(ca);
    if (*cmp) return cmd_compare(cpa);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
