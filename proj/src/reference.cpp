#include "outlier/reference.hpp"

#include "outlier/exponents.hpp"
#include "outlier/report_io.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#ifndef OUTLIER_DATA_DIR
#define OUTLIER_DATA_DIR "data"
#endif

namespace outlier {

std::string default_reference_path() { return std::string(OUTLIER_DATA_DIR) + "/reference_values.json"; }

bool within_tolerance(double actual, double expected, double tolerance, bool relative) {
  const double err = std::abs(actual - expected);
  return relative ? err <= tolerance * std::abs(expected) : err <= tolerance;
}

namespace {

Distribution dist(const ordered_json& args, const char* key) {
  return distribution_from_values(args.at(key).get<std::vector<double>>());
}

Subset one_based(const ordered_json& args, const char* key) {
  std::vector<int> m;
  for (int i : args.at(key).get<std::vector<int>>()) m.push_back(i - 1);
  return Subset::of(m);
}

double evaluate(const std::string& q, const ordered_json& a) {
  if (q == "renyi") return renyi(dist(a, "p"), dist(a, "q"), a.at("order").get<double>()).to_double();
  if (q == "gjs") return gjs(dist(a, "p"), dist(a, "q"), a.at("alpha").get<double>()).to_double();
  const auto M = a.contains("M") ? a.at("M").get<int>() : 0;
  const auto T = a.contains("T") ? a.at("T").get<int>() : 1;
  if (q == "exp_ld") return exp_ld(dist(a, "pn"), dist(a, "pa"), M, T).value;
  if (q == "exp_fixed_lnv_one") return exp_fixed_lnv_one(dist(a, "pn"), dist(a, "pa"), M).value;
  if (q == "exp_fixed_lnv_T") return exp_fixed_lnv_T(dist(a, "pn"), dist(a, "pa"), M, T).value;
  if (q == "exp_omega_one") return exp_omega_one(a.at("lambda").get<double>(), dist(a, "pn"), dist(a, "pa"), M).value;
  if (q == "exp_l_one") return exp_l_one(a.at("lambda").get<double>(), dist(a, "pn"), dist(a, "pa"), M).value;
  if (q == "exp_omega_set")
    return exp_omega_set(a.at("lambda").get<double>(), dist(a, "pn"), dist(a, "pa"), M, one_based(a, "B"), T).value;
  if (q == "exp_l_set")
    return exp_l_set(a.at("lambda").get<double>(), dist(a, "pn"), dist(a, "pa"), M, one_based(a, "B"), T).value;
  if (q == "bayes_fixed_lambda") return bayes_fixed(dist(a, "pn"), dist(a, "pa"), M, T).lambda;
  if (q == "bayes_seq") {
    if (a.contains("lambda2_grid"))
      return bayes_seq(dist(a, "pn"), dist(a, "pa"), M, T, a.at("lambda2_grid").get<std::vector<double>>()).value;
    return bayes_seq(dist(a, "pn"), dist(a, "pa"), M, T).value;
  }
  throw std::invalid_argument("unknown reference quantity '" + q + "'");
}

}  // namespace

std::vector<ReferenceCheck> load_reference_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read reference values from '" + path + "'");
  const ordered_json doc = ordered_json::parse(in);
  if (doc.at("version").get<int>() != 1) throw std::runtime_error("unsupported reference file version");
  std::vector<ReferenceCheck> out;
  for (const auto& e : doc.at("values")) {
    ReferenceCheck c;
    c.id = e.at("id").get<std::string>();
    c.description = e.at("description").get<std::string>();
    c.quantity = e.at("quantity").get<std::string>();
    c.expected = e.at("expected").get<double>();
    c.tolerance = e.at("tolerance").get<double>();
    const auto kind = e.at("tolerance_kind").get<std::string>();
    if (kind != "absolute" && kind != "relative") throw std::runtime_error("bad tolerance_kind for " + c.id);
    c.relative = kind == "relative";
    if (!e.at("criterion").is_null()) c.criterion = e.at("criterion").get<int>();
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<ReferenceCheck> run_reference_checks(const std::string& path, std::optional<int> criterion) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read reference values from '" + path + "'");
  const ordered_json doc = ordered_json::parse(in);
  std::vector<ReferenceCheck> checks = load_reference_values(path);
  std::vector<ReferenceCheck> out;
  std::size_t i = 0;
  for (const auto& e : doc.at("values")) {
    ReferenceCheck c = checks[i++];
    if (criterion && c.criterion != criterion) continue;
    c.actual = evaluate(c.quantity, e.at("args"));
    c.pass = within_tolerance(c.actual, c.expected, c.tolerance, c.relative);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace outlier
