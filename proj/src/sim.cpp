#include "outlier/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace outlier {

void ExperimentConfig::validate() const {
  if (!is_sequential(test.regime) && test.regime != Regime::fix_lnv_one && test.regime != Regime::fix_lnv_T &&
      test.regime != Regime::fix_zwh_one && test.regime != Regime::fix_zwh_T)
    throw std::invalid_argument("unknown regime");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (sweep.empty()) throw std::invalid_argument("sweep must list at least one n");
  if (nominal.alphabet_size() != test.alphabet_size || anomalous.alphabet_size() != test.alphabet_size)
    throw std::invalid_argument("distributions do not match the alphabet size");
  if (!truth.is_subset_of(Subset::range(0, test.M))) throw std::invalid_argument("truth index out of range");
  if (is_at_most(test.regime)) {
    if (truth.size() > test.T) throw std::invalid_argument("truth has more than T outliers");
  } else if (truth.size() != test.T) {
    throw std::invalid_argument("exact regimes need exactly T true outliers");
  }
  for (long long n : sweep) {
    TestConfig t = test;
    t.n = n;
    t.validate();
  }
}

std::vector<Distribution> ExperimentConfig::rows() const {
  std::vector<Distribution> r;
  for (int i = 0; i < test.M; ++i) r.push_back(truth.contains(i) ? anomalous : nominal);
  return r;
}

Outcome classify(const Verdict& v, const Subset& truth) {
  if (v.truncated) return Outcome::truncated;
  if (truth.empty()) return v.label.is_null() ? Outcome::correct : Outcome::false_alarm;
  if (v.label.is_null()) return Outcome::false_reject;
  return v.label.set() == truth ? Outcome::correct : Outcome::misclassified;
}

Rate wilson(long long successes, long long trials) {
  if (trials < 1) throw std::invalid_argument("wilson interval needs trials >= 1");
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double denom = 1.0 + z * z / n;
  const double center = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  return {p, std::max(0.0, center - half), std::min(1.0, center + half)};
}

double SimulationReport::truncated_fraction() const {
  long long t = 0, all = 0;
  for (const auto& p : points) {
    t += p.counts.truncated;
    all += p.trials;
  }
  return all == 0 ? 0.0 : static_cast<double>(t) / static_cast<double>(all);
}

double theory_exponent(const ExperimentConfig& cfg, const SimplexOptimizerSettings& settings) {
  const auto& pn = cfg.nominal;
  const auto& pa = cfg.anomalous;
  const TestConfig& t = cfg.test;
  const Subset rep = Subset::range(0, cfg.truth.size());
  switch (t.regime) {
    case Regime::ep_exact_one: return exp_ep_exact_one(pn, pa, t.M);
    case Regime::est_exact_one: return exp_est_exact_one(pn, pa, t.M);
    case Regime::est_exact_T: return exp_ld(pn, pa, t.M, t.T).value;
    case Regime::est_atmost_one:
    case Regime::est_atmost_T:
      if (cfg.truth.empty()) return t.lambda1;
      return std::min(t.lambda1, exp_omega_set(t.lambda2, pn, pa, t.M, rep, t.T, CandidateFamily::no_supersets, settings).value);
    case Regime::fix_lnv_one: return exp_fixed_lnv_one(pn, pa, t.M, settings).value;
    case Regime::fix_lnv_T: return exp_fixed_lnv_T(pn, pa, t.M, t.T, settings).value;
    case Regime::fix_zwh_one:
    case Regime::fix_zwh_T:
      if (cfg.truth.empty()) return t.lambda;
      return std::min(t.lambda, exp_l_set(t.lambda, pn, pa, t.M, rep, t.T, CandidateFamily::no_supersets, settings).value);
  }
  throw std::logic_error("unhandled regime");
}

namespace {

struct TrialResult {
  Outcome outcome = Outcome::correct;
  long long tau = 0;
};

template <class F>
void parallel_for(long long count, int workers, F&& body) {
  workers = std::max(1, std::min<int>(workers, static_cast<int>(std::min<long long>(count, 1024))));
  if (workers == 1) {
    for (long long i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<long long> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (long long i; !failed && (i = next.fetch_add(1)) < count;) {
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

SweepPoint summarize(const std::vector<TrialResult>& results, long long n, const Subset& truth, double theory) {
  SweepPoint p;
  p.n = n;
  p.hypothesis = truth.empty() ? "H_r" : "H_" + truth.to_string();
  p.trials = static_cast<long long>(results.size());
  long long sum = 0;
  for (const auto& r : results) {
    switch (r.outcome) {
      case Outcome::correct: ++p.counts.correct; break;
      case Outcome::misclassified: ++p.counts.misclassified; break;
      case Outcome::false_reject: ++p.counts.false_reject; break;
      case Outcome::false_alarm: ++p.counts.false_alarm; break;
      case Outcome::truncated: ++p.counts.truncated; break;
    }
    sum += r.tau;
  }
  p.mean_tau = static_cast<double>(sum) / static_cast<double>(p.trials);
  double ss = 0.0;
  for (const auto& r : results) ss += (static_cast<double>(r.tau) - p.mean_tau) * (static_cast<double>(r.tau) - p.mean_tau);
  p.tau_se = p.trials > 1 ? std::sqrt(ss / static_cast<double>(p.trials - 1) / static_cast<double>(p.trials)) : 0.0;

  p.misclassification = wilson(p.counts.misclassified, p.trials);
  p.false_reject = wilson(p.counts.false_reject, p.trials);
  p.false_alarm = wilson(p.counts.false_alarm, p.trials);
  p.truncation = wilson(p.counts.truncated, p.trials);
  const Rate err = wilson(p.counts.errors(), p.trials);
  p.wilson_hi = err.hi;
  p.zero_errors = p.counts.errors() == 0;
  p.error_prob = p.zero_errors ? err.hi : err.p;
  p.exponent_is_lower_bound = p.zero_errors;
  p.exponent_estimate = p.mean_tau > 0.0 ? -std::log(p.error_prob) / p.mean_tau : 0.0;
  p.theory_exponent = theory;
  return p;
}

}  // namespace

SimulationReport run_experiment(const ExperimentConfig& cfg, int workers) {
  cfg.validate();
  SimulationReport report;
  report.config = cfg;
  report.config.test.n = cfg.sweep.front();
  report.points.resize(cfg.sweep.size());
  const double theory = theory_exponent(cfg);
  const auto rows = cfg.rows();

  // Largest n first.
  std::vector<std::size_t> order(cfg.sweep.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cfg.sweep[a] > cfg.sweep[b]; });

  std::vector<TrialResult> results(static_cast<std::size_t>(cfg.trials));
  for (std::size_t s : order) {
    TestConfig test = cfg.test;
    test.n = cfg.sweep[s];
    parallel_for(cfg.trials, workers, [&](long long trial) {
      auto src = ObservationSource::generative(rows, derive_seed(cfg.seed, s, static_cast<std::uint64_t>(trial)));
      const Verdict v = run_test(src, test);
      results[static_cast<std::size_t>(trial)] = {classify(v, cfg.truth), v.tau};
    });
    report.points[s] = summarize(results, test.n, cfg.truth, theory);
  }
  return report;
}

std::vector<UniversalityRow> estimate_universality(
    const ExperimentConfig& base, const std::vector<std::pair<Distribution, Distribution>>& pairs, int workers) {
  if (!is_stopping_time_universal(base.test.regime))
    throw std::invalid_argument("the stopping-time constraint applies to the EST family only");
  if (base.sweep.size() != 1) throw std::invalid_argument("universality check takes a single n");
  std::vector<UniversalityRow> out;
  for (const auto& [pn, pa] : pairs) {
    ExperimentConfig cfg = base;
    cfg.nominal = pn;
    cfg.anomalous = pa;
    const SimulationReport r = run_experiment(cfg, workers);
    const SweepPoint& p = r.points.front();
    out.push_back({pn, pa, p.n, p.mean_tau, p.tau_se, p.mean_tau - 2.0 * p.tau_se <= static_cast<double>(p.n)});
  }
  return out;
}

std::vector<ComparisonRow> compare_tests(const ExperimentConfig& sequential, Regime fixed_regime, int workers) {
  if (!is_sequential(sequential.test.regime)) throw std::invalid_argument("first regime must be sequential");
  if (is_sequential(fixed_regime)) throw std::invalid_argument("second regime must be fixed-length");
  const SimulationReport seq = run_experiment(sequential, workers);
  ExperimentConfig fixed = sequential;
  fixed.test.regime = fixed_regime;
  fixed.sweep.clear();
  for (const auto& p : seq.points) fixed.sweep.push_back(std::max(1LL, std::llround(p.mean_tau)));
  const SimulationReport fix = run_experiment(fixed, workers);
  std::vector<ComparisonRow> out;
  for (std::size_t i = 0; i < seq.points.size(); ++i) {
    const auto& a = seq.points[i];
    const auto& b = fix.points[i];
    out.push_back({a.n, a.mean_tau, b.n, a.error_prob, b.error_prob, a.exponent_estimate, b.exponent_estimate});
  }
  return out;
}

}  // namespace outlier
