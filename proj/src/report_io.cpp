#include "outlier/report_io.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace outlier {

Distribution distribution_from_values(const std::vector<double>& values) {
  if (values.size() < 2) throw std::invalid_argument("a distribution needs at least two probabilities");
  double sum = 0.0;
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("probabilities must be finite and non-negative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("probabilities must sum to 1 (within 1e-9)");
  Eigen::VectorXd p(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) p[static_cast<Eigen::Index>(i)] = values[i] / sum;
  return Distribution(std::move(p));
}

Distribution parse_distribution(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw std::invalid_argument("empty probability in '" + text + "'");
    item = item.substr(b, e - b + 1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size())
      throw std::invalid_argument("not a number: '" + item + "'");
    values.push_back(v);
  }
  return distribution_from_values(values);
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

namespace {

ordered_json number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }
double number(const ordered_json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

ordered_json probs(const Distribution& d) {
  ordered_json a = ordered_json::array();
  for (int x = 0; x < d.alphabet_size(); ++x) a.push_back(d[x]);
  return a;
}

Distribution probs(const ordered_json& j) { return Distribution(Eigen::Map<const Eigen::VectorXd>(
    j.get<std::vector<double>>().data(), static_cast<Eigen::Index>(j.size()))); }

ordered_json rate(const Rate& r) { return {{"p", r.p}, {"lo", r.lo}, {"hi", r.hi}}; }
Rate rate(const ordered_json& j) { return {j.at("p").get<double>(), j.at("lo").get<double>(), j.at("hi").get<double>()}; }

ordered_json subset_json(const Subset& s) {
  ordered_json a = ordered_json::array();
  for (int i : s.members()) a.push_back(i + 1);
  return a;
}

Subset subset_json(const ordered_json& j) {
  std::vector<int> m;
  for (int i : j.get<std::vector<int>>()) m.push_back(i - 1);
  return Subset::of(m);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

ordered_json to_json(const ExperimentConfig& cfg) {
  const TestConfig& t = cfg.test;
  ordered_json j;
  j["regime"] = std::string(to_string(t.regime));
  j["M"] = t.M;
  j["T"] = t.T;
  j["alphabet_size"] = t.alphabet_size;
  j["beta"] = t.beta;
  j["lambda1"] = t.lambda1;
  j["lambda2"] = t.lambda2;
  j["lambda"] = t.lambda;
  j["k_max"] = t.k_max;
  j["nominal"] = probs(cfg.nominal);
  j["anomalous"] = probs(cfg.anomalous);
  j["truth"] = subset_json(cfg.truth);
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["sweep"] = cfg.sweep;
  return j;
}

ExperimentConfig experiment_config_from_json(const ordered_json& j) {
  ExperimentConfig cfg;
  const auto regime = parse_regime(j.at("regime").get<std::string>());
  if (!regime) throw std::invalid_argument("unknown regime in report");
  cfg.test.regime = *regime;
  cfg.test.M = j.at("M").get<int>();
  cfg.test.T = j.at("T").get<int>();
  cfg.test.alphabet_size = j.at("alphabet_size").get<int>();
  cfg.test.beta = j.at("beta").get<double>();
  cfg.test.lambda1 = j.at("lambda1").get<double>();
  cfg.test.lambda2 = j.at("lambda2").get<double>();
  cfg.test.lambda = j.at("lambda").get<double>();
  cfg.test.k_max = j.at("k_max").get<long long>();
  cfg.nominal = probs(j.at("nominal"));
  cfg.anomalous = probs(j.at("anomalous"));
  cfg.truth = subset_json(j.at("truth"));
  cfg.trials = j.at("trials").get<long long>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.sweep = j.at("sweep").get<std::vector<long long>>();
  cfg.test.n = cfg.sweep.empty() ? cfg.test.n : cfg.sweep.front();
  return cfg;
}

ordered_json to_json(const SimulationReport& report) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "simulation";
  j["config"] = to_json(report.config);
  ordered_json pts = ordered_json::array();
  for (const auto& p : report.points) {
    ordered_json q;
    q["n"] = p.n;
    q["hypothesis"] = p.hypothesis;
    q["trials"] = p.trials;
    q["counts"] = {{"correct", p.counts.correct},
                   {"misclassified", p.counts.misclassified},
                   {"false_reject", p.counts.false_reject},
                   {"false_alarm", p.counts.false_alarm},
                   {"truncated", p.counts.truncated}};
    q["misclassification"] = rate(p.misclassification);
    q["false_reject"] = rate(p.false_reject);
    q["false_alarm"] = rate(p.false_alarm);
    q["truncation"] = rate(p.truncation);
    q["error_prob"] = p.error_prob;
    q["wilson_hi"] = p.wilson_hi;
    q["zero_errors"] = p.zero_errors;
    q["mean_tau"] = p.mean_tau;
    q["tau_se"] = p.tau_se;
    q["exponent_estimate"] = number(p.exponent_estimate);
    q["exponent_is_lower_bound"] = p.exponent_is_lower_bound;
    q["theory_exponent"] = number(p.theory_exponent);
    pts.push_back(std::move(q));
  }
  j["points"] = std::move(pts);
  return j;
}

SimulationReport simulation_report_from_json(const ordered_json& j) {
  if (j.at("schema_version").get<std::string>() != kSchemaVersion)
    throw std::invalid_argument("unsupported report schema version");
  if (j.at("kind").get<std::string>() != "simulation") throw std::invalid_argument("not a simulation report");
  SimulationReport r;
  r.config = experiment_config_from_json(j.at("config"));
  for (const auto& q : j.at("points")) {
    SweepPoint p;
    p.n = q.at("n").get<long long>();
    p.hypothesis = q.at("hypothesis").get<std::string>();
    p.trials = q.at("trials").get<long long>();
    const auto& c = q.at("counts");
    p.counts = {c.at("correct").get<long long>(), c.at("misclassified").get<long long>(),
                c.at("false_reject").get<long long>(), c.at("false_alarm").get<long long>(),
                c.at("truncated").get<long long>()};
    p.misclassification = rate(q.at("misclassification"));
    p.false_reject = rate(q.at("false_reject"));
    p.false_alarm = rate(q.at("false_alarm"));
    p.truncation = rate(q.at("truncation"));
    p.error_prob = q.at("error_prob").get<double>();
    p.wilson_hi = q.at("wilson_hi").get<double>();
    p.zero_errors = q.at("zero_errors").get<bool>();
    p.mean_tau = q.at("mean_tau").get<double>();
    p.tau_se = q.at("tau_se").get<double>();
    p.exponent_estimate = number(q.at("exponent_estimate"));
    p.exponent_is_lower_bound = q.at("exponent_is_lower_bound").get<bool>();
    p.theory_exponent = number(q.at("theory_exponent"));
    r.points.push_back(std::move(p));
  }
  return r;
}

std::string write_report_json(const SimulationReport& report) { return to_json(report).dump(2) + "\n"; }

SimulationReport read_report_json(const std::string& text) {
  return simulation_report_from_json(ordered_json::parse(text));
}

std::string write_table_csv(const SimulationReport& report) {
  std::string out =
      "n,hypothesis,trials,errors_by_class,error_prob,wilson_hi,mean_tau,tau_se,exponent_estimate,theory_exponent\n";
  for (const auto& p : report.points) {
    const std::string classes = "misclassified=" + std::to_string(p.counts.misclassified) +
                                ";false_reject=" + std::to_string(p.counts.false_reject) +
                                ";false_alarm=" + std::to_string(p.counts.false_alarm) +
                                ";truncated=" + std::to_string(p.counts.truncated);
    out += std::to_string(p.n) + "," + csv_field(p.hypothesis) + "," + std::to_string(p.trials) + "," + classes + "," +
           format_double(p.error_prob) + "," + format_double(p.wilson_hi) + "," + format_double(p.mean_tau) + "," +
           format_double(p.tau_se) + "," + format_double(p.exponent_estimate) + "," +
           format_double(p.theory_exponent) + "\n";
  }
  return out;
}

}  // namespace outlier
