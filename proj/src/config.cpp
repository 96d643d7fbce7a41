#include "outlier/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

namespace outlier {

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

void require_map(const YAML::Node& n, const std::string& what, const std::set<std::string>& allowed) {
  if (!n.IsMap()) throw ConfigError(what + " must be a mapping", line_of(n));
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + what, line_of(kv.first));
  }
}

template <class T>
T scalar(const YAML::Node& parent, const std::string& key, const std::string& what) {
  const YAML::Node n = parent[key];
  if (!n) throw ConfigError("missing key '" + key + "' in " + what, line_of(parent));
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("'" + key + "' has the wrong type", line_of(n));
  }
}

template <class T>
T scalar_or(const YAML::Node& parent, const std::string& key, T fallback, const std::string& what) {
  return parent[key] ? scalar<T>(parent, key, what) : fallback;
}

template <class T>
std::vector<T> sequence(const YAML::Node& parent, const std::string& key, const std::string& what) {
  const YAML::Node n = parent[key];
  if (!n) throw ConfigError("missing key '" + key + "' in " + what, line_of(parent));
  if (!n.IsSequence()) throw ConfigError("'" + key + "' must be a list", line_of(n));
  std::vector<T> out;
  for (const auto& e : n) {
    try {
      out.push_back(e.as<T>());
    } catch (const YAML::Exception&) {
      throw ConfigError("'" + key + "' holds an entry of the wrong type", line_of(e));
    }
  }
  return out;
}

Distribution distribution(const YAML::Node& parent, const std::string& key) {
  const auto values = sequence<double>(parent, key, "distributions");
  try {
    return distribution_from_values(values);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("'" + key + "': " + e.what(), line_of(parent[key]));
  }
}

}  // namespace

RunConfig parse_run_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, e.mark.line + 1);
  }
  require_map(root, "document", {"schema_version", "experiment", "distributions", "truth", "monte_carlo", "compare"});
  if (scalar<int>(root, "schema_version", "document") != 1)
    throw ConfigError("unsupported schema_version", line_of(root["schema_version"]));

  RunConfig rc;
  ExperimentConfig& cfg = rc.experiment;

  const YAML::Node exp = root["experiment"];
  if (!exp) throw ConfigError("missing 'experiment' section");
  require_map(exp, "experiment", {"regime", "M", "T", "beta", "lambda1", "lambda2", "lambda", "k_max"});
  const auto regime_name = scalar<std::string>(exp, "regime", "experiment");
  const auto regime = parse_regime(regime_name);
  if (!regime) throw ConfigError("unknown regime '" + regime_name + "'", line_of(exp["regime"]));
  cfg.test.regime = *regime;
  cfg.test.M = scalar<int>(exp, "M", "experiment");
  cfg.test.T = scalar_or<int>(exp, "T", 1, "experiment");
  cfg.test.beta = scalar_or<double>(exp, "beta", cfg.test.beta, "experiment");
  cfg.test.lambda1 = scalar_or<double>(exp, "lambda1", 0.0, "experiment");
  cfg.test.lambda2 = scalar_or<double>(exp, "lambda2", 0.0, "experiment");
  cfg.test.lambda = scalar_or<double>(exp, "lambda", 0.0, "experiment");
  cfg.test.k_max = scalar_or<long long>(exp, "k_max", cfg.test.k_max, "experiment");

  const YAML::Node dist = root["distributions"];
  if (!dist) throw ConfigError("missing 'distributions' section");
  require_map(dist, "distributions", {"nominal", "anomalous"});
  cfg.nominal = distribution(dist, "nominal");
  cfg.anomalous = distribution(dist, "anomalous");
  if (cfg.nominal.alphabet_size() != cfg.anomalous.alphabet_size())
    throw ConfigError("nominal and anomalous distributions use different alphabets", line_of(dist));
  cfg.test.alphabet_size = cfg.nominal.alphabet_size();

  std::vector<int> truth;
  for (int i : sequence<int>(root, "truth", "document")) {
    if (i < 1 || i > cfg.test.M) throw ConfigError("truth index out of range 1..M", line_of(root["truth"]));
    truth.push_back(i - 1);
  }
  cfg.truth = Subset::of(truth);

  const YAML::Node mc = root["monte_carlo"];
  if (!mc) throw ConfigError("missing 'monte_carlo' section");
  require_map(mc, "monte_carlo", {"trials", "seed", "sweep"});
  cfg.trials = scalar<long long>(mc, "trials", "monte_carlo");
  cfg.seed = scalar<std::uint64_t>(mc, "seed", "monte_carlo");
  cfg.sweep = sequence<long long>(mc, "sweep", "monte_carlo");
  if (!cfg.sweep.empty()) cfg.test.n = cfg.sweep.front();

  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), line_of(exp));
  }

  if (const YAML::Node cmp = root["compare"]) {
    require_map(cmp, "compare", {"fixed_regime", "lambda2_grid", "candidate_family"});
    CompareSettings cs;
    if (cmp["fixed_regime"]) {
      const auto name = scalar<std::string>(cmp, "fixed_regime", "compare");
      const auto r = parse_regime(name);
      if (!r || is_sequential(*r)) throw ConfigError("fixed_regime must name a fixed-length regime", line_of(cmp["fixed_regime"]));
      cs.fixed_regime = r;
    }
    if (cmp["lambda2_grid"]) {
      cs.lambda2_grid = sequence<double>(cmp, "lambda2_grid", "compare");
      for (double v : cs.lambda2_grid)
        if (!(v > 0.0)) throw ConfigError("lambda2_grid entries must be positive", line_of(cmp["lambda2_grid"]));
      if (cs.lambda2_grid.empty()) throw ConfigError("lambda2_grid is empty", line_of(cmp["lambda2_grid"]));
    }
    if (cmp["candidate_family"]) {
      const auto f = scalar<std::string>(cmp, "candidate_family", "compare");
      if (f == "all") cs.family = CandidateFamily::all;
      else if (f == "no-supersets") cs.family = CandidateFamily::no_supersets;
      else if (f == "same-size") cs.family = CandidateFamily::same_size;
      else throw ConfigError("unknown candidate_family '" + f + "'", line_of(cmp["candidate_family"]));
    }
    rc.compare = cs;
  }
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

}  // namespace outlier
