#include "outlier/exponent_report.hpp"
#include "outlier/report_io.hpp"

#include <algorithm>
#include <stdexcept>

namespace outlier {

namespace {

double need(const std::optional<double>& v, const char* name) {
  if (!v) throw std::invalid_argument(std::string("this regime needs --") + name);
  return *v;
}

std::string t_or_set(const Subset& s) { return s.to_string(); }

}  // namespace

ExponentReport exponent_report(const ExponentQuery& q, const SimplexOptimizerSettings& settings) {
  ExponentReport r;
  r.regime = std::string(to_string(q.regime));
  r.M = q.M;
  r.T = q.T;
  const auto& pn = q.pn;
  const auto& pa = q.pa;
  auto add = [&](std::string name, double v, std::map<std::string, std::string> args = {}) {
    r.entries.push_back({std::move(name), v, std::move(args)});
  };

  switch (q.regime) {
    case Regime::ep_exact_one:
      add("misclassification", exp_ep_exact_one(pn, pa, q.M));
      break;
    case Regime::est_exact_one:
      add("misclassification", exp_est_exact_one(pn, pa, q.M));
      break;
    case Regime::est_exact_T: {
      const LdResult ld = exp_ld(pn, pa, q.M, q.T);
      add("misclassification", ld.value, {{"t", std::to_string(ld.t)}});
      break;
    }
    case Regime::est_atmost_one:
    case Regime::est_atmost_T: {
      const double l1 = need(q.lambda1, "lambda1"), l2 = need(q.lambda2, "lambda2");
      if (!(0.0 < l2 && l2 < l1)) throw std::invalid_argument("need 0 < lambda2 < lambda1");
      const int T = q.regime == Regime::est_atmost_one ? 1 : q.T;
      double worst = l1;
      for (int s = 1; s <= T; ++s) {
        const Subset B = Subset::range(0, s);
        const auto om = exp_omega_set(l2, pn, pa, q.M, B, T, q.family, settings);
        const double lt = lambda_tilde1(pn, pa, q.M, T, B, q.family);
        add("false_reject|B|=" + std::to_string(s), om.value,
            {{"lambda2", format_double(l2)}, {"C", t_or_set(om.C)}});
        add("lambda_tilde1|B|=" + std::to_string(s), lt);
        worst = std::min(worst, om.value);
      }
      add("misclassification_false_alarm", l1, {{"lambda1", format_double(l1)}});
      add("bayesian", worst);
      break;
    }
    case Regime::fix_lnv_one: {
      const auto e = exp_fixed_lnv_one(pn, pa, q.M, settings);
      add("misclassification", e.value);
      break;
    }
    case Regime::fix_lnv_T: {
      const auto e = exp_fixed_lnv_T(pn, pa, q.M, q.T, settings);
      add("misclassification", e.value, {{"C", t_or_set(e.C)}});
      break;
    }
    case Regime::fix_zwh_one:
    case Regime::fix_zwh_T: {
      const double lam = need(q.lambda, "lambda");
      const int T = q.regime == Regime::fix_zwh_one ? 1 : q.T;
      double worst = lam;
      for (int s = 1; s <= T; ++s) {
        const auto l = exp_l_set(lam, pn, pa, q.M, Subset::range(0, s), T, q.family, settings);
        add("false_reject|B|=" + std::to_string(s), l.value,
            {{"lambda", format_double(lam)}, {"C", t_or_set(l.C)}, {"D", t_or_set(l.D)}});
        worst = std::min(worst, l.value);
      }
      add("misclassification_false_alarm", lam, {{"lambda", format_double(lam)}});
      add("bayesian", worst);
      break;
    }
  }
  return r;
}

ordered_json to_json(const ExponentReport& r) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["regime"] = r.regime;
  j["M"] = r.M;
  j["T"] = r.T;
  j["entries"] = ordered_json::array();
  for (const auto& e : r.entries) {
    ordered_json row;
    row["name"] = e.name;
    row["value"] = e.value;
    row["arguments"] = ordered_json::object();
    for (const auto& [k, v] : e.arguments) row["arguments"][k] = v;
    j["entries"].push_back(std::move(row));
  }
  return j;
}

}  // namespace outlier
