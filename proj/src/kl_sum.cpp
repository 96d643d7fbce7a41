#include "outlier/exponents.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace outlier {

namespace {

// Slack on constraint checks so that exactly equal group members satisfy G <= 0.
constexpr double kFeasibilitySlack = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

double xlogx(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Evaluates objective and constraints of a reduced problem on a packed point.
class Evaluator {
 public:
  explicit Evaluator(const ReducedProblem& p) : p_(p), X_(p.alphabet_size) {
    const int C = static_cast<int>(p.classes.size());
    active_.assign(static_cast<std::size_t>(C), false);
    for (const auto& con : p.constraints) {
      for (const auto* side : {&con.lhs, &con.rhs})
        for (const auto& b : *side)
          for (int c = 0; c < C; ++c)
            if (b.multiplicity[static_cast<std::size_t>(c)] > 0) active_[static_cast<std::size_t>(c)] = true;
    }
    for (int c = 0; c < C; ++c) {
      const auto& terms = p.classes[static_cast<std::size_t>(c)];
      if (terms.empty()) throw std::invalid_argument("class without objective terms");
      if (terms.size() > 1) active_[static_cast<std::size_t>(c)] = true;
      for (const auto& t : terms) {
        if (t.target.alphabet_size() != X_) throw std::invalid_argument("alphabet mismatch in reduced problem");
        if (t.weight < 0) throw std::invalid_argument("negative objective weight");
      }
      if (active_[static_cast<std::size_t>(c)]) active_index_.push_back(c);
    }
    // log of every target, -inf where the target has no mass
    for (const auto& terms : p.classes) {
      std::vector<std::vector<double>> logs;
      for (const auto& t : terms) {
        std::vector<double> l(static_cast<std::size_t>(X_));
        for (int x = 0; x < X_; ++x) l[static_cast<std::size_t>(x)] = t.target[x] > 0 ? std::log(t.target[x]) : -kInf;
        logs.push_back(std::move(l));
      }
      target_logs_.push_back(std::move(logs));
    }
    q_.assign(static_cast<std::size_t>(C * X_), 0.0);
    negent_.assign(static_cast<std::size_t>(C), 0.0);
    mean_.assign(static_cast<std::size_t>(X_), 0.0);
    // inactive classes sit at their single target
    for (int c = 0; c < C; ++c) {
      if (active_[static_cast<std::size_t>(c)]) continue;
      const auto& t = p.classes[static_cast<std::size_t>(c)].front().target;
      for (int x = 0; x < X_; ++x) q_[static_cast<std::size_t>(c * X_ + x)] = t[x];
      negent_[static_cast<std::size_t>(c)] = class_negent(c);
    }
  }

  int dims() const { return static_cast<int>(active_index_.size()) * (X_ - 1); }
  int alphabet_size() const { return X_; }

  // Point layout: for each active class, probabilities of symbols 1..X-1.
  bool load(const double* point) {
    for (std::size_t a = 0; a < active_index_.size(); ++a) {
      const int c = active_index_[a];
      double rest = 1.0;
      for (int x = 1; x < X_; ++x) {
        double v = point[a * static_cast<std::size_t>(X_ - 1) + static_cast<std::size_t>(x - 1)];
        if (v < -1e-12 || v > 1.0 + 1e-12) return false;
        v = std::clamp(v, 0.0, 1.0);
        q_[static_cast<std::size_t>(c * X_ + x)] = v;
        rest -= v;
      }
      if (rest < -1e-12) return false;
      q_[static_cast<std::size_t>(c * X_)] = std::max(rest, 0.0);
      negent_[static_cast<std::size_t>(c)] = class_negent(c);
    }
    return true;
  }

  double objective() const {
    double s = 0.0;
    for (int c : active_index_) {
      const auto& terms = p_.classes[static_cast<std::size_t>(c)];
      for (std::size_t t = 0; t < terms.size(); ++t) {
        if (terms[t].weight == 0.0) continue;
        double cross = 0.0;
        const auto& lg = target_logs_[static_cast<std::size_t>(c)][t];
        for (int x = 0; x < X_; ++x) {
          const double q = q_[static_cast<std::size_t>(c * X_ + x)];
          if (q <= 0.0) continue;
          if (lg[static_cast<std::size_t>(x)] == -kInf) return kInf;
          cross += q * lg[static_cast<std::size_t>(x)];
        }
        s += terms[t].weight * (negent_[static_cast<std::size_t>(c)] - cross);
      }
    }
    return s;
  }

  bool feasible() {
    for (const auto& con : p_.constraints) {
      double lhs = 0.0;
      for (const auto& b : con.lhs) lhs += block(b);
      if (con.dominance) {
        double rhs = 0.0;
        for (const auto& b : con.rhs) rhs += block(b);
        if (lhs < rhs - kFeasibilitySlack) return false;
      } else if (lhs > con.lambda + kFeasibilitySlack) {
        return false;
      }
    }
    return true;
  }

  int constraint_count() const { return static_cast<int>(p_.constraints.size()); }

  // Signed violation of constraint k: <= 0 means satisfied (without slack).
  double violation(int k) {
    const auto& con = p_.constraints[static_cast<std::size_t>(k)];
    double lhs = 0.0;
    for (const auto& b : con.lhs) lhs += block(b);
    if (!con.dominance) return lhs - con.lambda;
    double rhs = 0.0;
    for (const auto& b : con.rhs) rhs += block(b);
    return rhs - lhs;
  }

  // Gradients with respect to the packed point of the last load(); q must be interior.
  void objective_gradient(Eigen::VectorXd& g) const {
    g.setZero(dims());
    for (std::size_t a = 0; a < active_index_.size(); ++a) {
      const int c = active_index_[a];
      const auto& terms = p_.classes[static_cast<std::size_t>(c)];
      for (std::size_t t = 0; t < terms.size(); ++t) {
        const auto& lg = target_logs_[static_cast<std::size_t>(c)][t];
        const double base = std::log(q(c, 0)) - lg[0];
        for (int x = 1; x < X_; ++x)
          g[static_cast<Eigen::Index>(a * static_cast<std::size_t>(X_ - 1)) + x - 1] +=
              terms[t].weight * (std::log(q(c, x)) - lg[static_cast<std::size_t>(x)] - base);
      }
    }
  }

  void violation_gradient(int k, Eigen::VectorXd& g) {
    const auto& con = p_.constraints[static_cast<std::size_t>(k)];
    g.setZero(dims());
    const double sign = con.dominance ? -1.0 : 1.0;
    for (const auto& b : con.lhs) add_block_gradient(b, sign, g);
    for (const auto& b : con.rhs) add_block_gradient(b, -sign, g);
  }

  std::vector<Distribution> classes() const {
    std::vector<Distribution> out;
    for (std::size_t c = 0; c < p_.classes.size(); ++c) {
      Eigen::VectorXd v(X_);
      double s = 0.0;
      for (int x = 0; x < X_; ++x) s += v[x] = q_[c * static_cast<std::size_t>(X_) + static_cast<std::size_t>(x)];
      out.emplace_back((v / s).eval());
    }
    return out;
  }

  // Point where every class sits on its own target, if the objective admits one.
  std::optional<std::vector<double>> target_point() const {
    std::vector<double> pt;
    for (int c : active_index_) {
      const auto& terms = p_.classes[static_cast<std::size_t>(c)];
      if (terms.size() != 1) return std::nullopt;
      for (int x = 1; x < X_; ++x) pt.push_back(terms.front().target[x]);
    }
    return pt;
  }

 private:
  double q(int c, int x) const { return q_[static_cast<std::size_t>(c * X_ + x)]; }

  // d/dq_{c,x} of sum_c m_c D(Q_c || mean) is m_c * log(q_cx / mean_x) relative to symbol 0.
  void add_block_gradient(const ReducedProblem::Block& b, double sign, Eigen::VectorXd& g) {
    double w = 0.0;
    std::fill(mean_.begin(), mean_.end(), 0.0);
    for (std::size_t c = 0; c < b.multiplicity.size(); ++c) {
      const int m = b.multiplicity[c];
      w += m;
      for (int x = 0; x < X_; ++x) mean_[static_cast<std::size_t>(x)] += m * q(static_cast<int>(c), x);
    }
    if (w <= 1.0) return;
    for (std::size_t a = 0; a < active_index_.size(); ++a) {
      const int c = active_index_[a];
      const int m = b.multiplicity[static_cast<std::size_t>(c)];
      if (m == 0) continue;
      const double base = std::log(q(c, 0) * w / mean_[0]);
      for (int x = 1; x < X_; ++x)
        g[static_cast<Eigen::Index>(a * static_cast<std::size_t>(X_ - 1)) + x - 1] +=
            sign * m * (std::log(q(c, x) * w / mean_[static_cast<std::size_t>(x)]) - base);
    }
  }

  double class_negent(int c) const {
    double s = 0.0;
    for (int x = 0; x < X_; ++x) s += xlogx(q_[static_cast<std::size_t>(c * X_ + x)]);
    return s;
  }

  // sum_c m_c D(Q_c || mean) = sum_c m_c H'(Q_c) - W H'(mean), H'(q) = sum q log q.
  double block(const ReducedProblem::Block& b) {
    double w = 0.0, s = 0.0;
    std::fill(mean_.begin(), mean_.end(), 0.0);
    for (std::size_t c = 0; c < b.multiplicity.size(); ++c) {
      const int m = b.multiplicity[c];
      if (m == 0) continue;
      w += m;
      s += m * negent_[c];
      for (int x = 0; x < X_; ++x) mean_[static_cast<std::size_t>(x)] += m * q_[c * static_cast<std::size_t>(X_) + static_cast<std::size_t>(x)];
    }
    if (w <= 1.0) return 0.0;
    double ent = 0.0;
    for (int x = 0; x < X_; ++x) ent += xlogx(mean_[static_cast<std::size_t>(x)] / w);
    return std::max(0.0, s - w * ent);
  }

  const ReducedProblem& p_;
  int X_;
  std::vector<bool> active_;
  std::vector<int> active_index_;
  std::vector<std::vector<std::vector<double>>> target_logs_;
  std::vector<double> q_, negent_, mean_;
};

// All points of one class's simplex grid with spacing 1/n: coordinates of symbols 1..X-1.
void simplex_grid(int dims, int n, std::vector<int>& cur, std::vector<std::vector<int>>& out, int budget) {
  if (static_cast<int>(cur.size()) == dims) {
    out.push_back(cur);
    return;
  }
  for (int i = 0; i <= budget; ++i) {
    cur.push_back(i);
    simplex_grid(dims, n, cur, out, budget - i);
    cur.pop_back();
  }
}

long long binom(int n, int k) {
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

long long grid_size(int active, int per_class_dims, int n) {
  const long long per = binom(n + per_class_dims, per_class_dims);
  long long total = 1;
  for (int a = 0; a < active; ++a) {
    if (total > std::numeric_limits<long long>::max() / per) return std::numeric_limits<long long>::max();
    total *= per;
  }
  return total;
}

struct Candidate {
  double value;
  std::vector<double> point;
};

// Best-improvement pattern search over the {-1,0,1}^d neighbourhood at spacing h.
void refine(Evaluator& ev, Candidate& cand, double h, double tol) {
  const int d = static_cast<int>(cand.point.size());
  if (d == 0) return;
  long long neighbours = 1;
  for (int i = 0; i < d; ++i) neighbours *= 3;
  std::vector<double> trial(static_cast<std::size_t>(d)), best_point;
  for (int iter = 0; iter < 100000; ++iter) {
    double best = cand.value;
    bool moved = false;
    for (long long code = 0; code < neighbours; ++code) {
      long long r = code;
      bool zero = true;
      for (int i = 0; i < d; ++i) {
        const int delta = static_cast<int>(r % 3) - 1;
        r /= 3;
        zero = zero && delta == 0;
        trial[static_cast<std::size_t>(i)] = cand.point[static_cast<std::size_t>(i)] + delta * h;
      }
      if (zero || !ev.load(trial.data())) continue;
      const double f = ev.objective();
      if (!(f < best - tol)) continue;
      if (!ev.feasible()) continue;
      best = f;
      best_point = trial;
      moved = true;
    }
    if (!moved) return;
    cand.value = best;
    cand.point = best_point;
  }
}

// Keeps class probabilities away from 0 so that the gradients stay finite.
constexpr double kInterior = 1e-10;

void pull_inside(Eigen::VectorXd& x, int per) {
  for (Eigen::Index a = 0; a < x.size(); a += per) {
    double sum = 0.0;
    for (int k = 0; k < per; ++k) sum += x[a + k] = std::clamp(x[a + k], kInterior, 1.0 - kInterior);
    if (sum > 1.0 - kInterior) x.segment(a, per) *= (1.0 - kInterior) / sum;
  }
}

bool inside(const Eigen::VectorXd& x, int per) {
  for (Eigen::Index a = 0; a < x.size(); a += per) {
    double sum = 0.0;
    for (int k = 0; k < per; ++k) {
      if (!(x[a + k] >= kInterior)) return false;
      sum += x[a + k];
    }
    if (sum > 1.0 - kInterior) return false;
  }
  return true;
}

// Sequential quadratic programming on the KKT system, started from a refined grid
// point. Hessian of the Lagrangian by central differences of the analytic gradient,
// flattened to positive definite; the QP is solved by enumerating active sets.
Candidate polish(Evaluator& ev, const Candidate& start, int per) {
  const int d = static_cast<int>(start.point.size());
  const int K = ev.constraint_count();
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(start.point.data(), d);
  pull_inside(x, per);
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(K), g(d), gk(d), tmp(d);
  Eigen::MatrixXd A(K, d), H(d, d);
  Eigen::VectorXd c(K);
  double rho = 1.0;

  auto lagrangian_gradient = [&](const Eigen::VectorXd& y, Eigen::VectorXd& out) {
    ev.load(y.data());
    ev.objective_gradient(out);
    for (int k = 0; k < K; ++k) {
      ev.violation_gradient(k, gk);
      out += mu[k] * gk;
    }
  };
  auto merit = [&](const Eigen::VectorXd& y) {
    ev.load(y.data());
    double m = ev.objective();
    for (int k = 0; k < K; ++k) m += rho * std::max(0.0, ev.violation(k));
    return m;
  };

  for (int iter = 0; iter < 200; ++iter) {
    ev.load(x.data());
    ev.objective_gradient(g);
    for (int k = 0; k < K; ++k) {
      c[k] = ev.violation(k);
      ev.violation_gradient(k, gk);
      A.row(k) = gk.transpose();
    }
    double margin = 1.0;
    for (int i = 0; i < d; ++i) margin = std::min({margin, x[i] - kInterior, 1.0 - kInterior - x[i]});
    const double eps = std::max(1e-12, std::min(1e-7, 0.5 * margin));
    Eigen::VectorXd xp = x, xm = x, gp(d), gm(d);
    for (int j = 0; j < d; ++j) {
      xp[j] = x[j] + eps;
      xm[j] = x[j] - eps;
      lagrangian_gradient(xp, gp);
      lagrangian_gradient(xm, gm);
      H.col(j) = (gp - gm) / (2.0 * eps);
      xp[j] = xm[j] = x[j];
    }
    H = (0.5 * (H + H.transpose())).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H);
    Eigen::VectorXd ev_vals = eig.eigenvalues();
    const double floor = 1e-8 * std::max(1.0, ev_vals.cwiseAbs().maxCoeff());
    for (int i = 0; i < d; ++i) ev_vals[i] = std::max(std::abs(ev_vals[i]), floor);
    H = eig.eigenvectors() * ev_vals.asDiagonal() * eig.eigenvectors().transpose();

    bool found = false;
    double best_q = std::numeric_limits<double>::infinity();
    Eigen::VectorXd step, step_mu;
    for (int mask = 0; mask < (1 << K); ++mask) {
      std::vector<int> act;
      for (int k = 0; k < K; ++k)
        if (mask >> k & 1) act.push_back(k);
      const int na = static_cast<int>(act.size());
      Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(d + na, d + na);
      Eigen::VectorXd rhs(d + na);
      kkt.topLeftCorner(d, d) = H;
      rhs.head(d) = -g;
      for (int i = 0; i < na; ++i) {
        kkt.block(d + i, 0, 1, d) = A.row(act[static_cast<std::size_t>(i)]);
        kkt.block(0, d + i, d, 1) = A.row(act[static_cast<std::size_t>(i)]).transpose();
        rhs[d + i] = -c[act[static_cast<std::size_t>(i)]];
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
      if (!lu.isInvertible()) continue;
      const Eigen::VectorXd sol = lu.solve(rhs);
      const Eigen::VectorXd dx = sol.head(d);
      Eigen::VectorXd m = Eigen::VectorXd::Zero(K);
      bool ok = true;
      for (int i = 0; i < na; ++i) {
        m[act[static_cast<std::size_t>(i)]] = sol[d + i];
        ok = ok && sol[d + i] >= -1e-12;
      }
      for (int k = 0; k < K && ok; ++k)
        if (!(mask >> k & 1)) ok = c[k] + A.row(k).dot(dx) <= 1e-12;
      if (!ok) continue;
      const double qv = 0.5 * dx.dot(H * dx) + g.dot(dx);
      if (qv < best_q) {
        best_q = qv;
        step = dx;
        step_mu = m.cwiseMax(0.0);
        found = true;
      }
    }
    if (!found) break;
    mu = step_mu;
    if (K > 0) rho = std::max(rho, 2.0 * mu.maxCoeff() + 1.0);

    const double m0 = merit(x);
    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
      tmp = x + alpha * step;
      if (!inside(tmp, per)) continue;
      if (merit(tmp) < m0) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    x = tmp;
    if ((alpha * step).cwiseAbs().maxCoeff() < 1e-13) break;
  }
  ev.load(x.data());
  return {ev.objective(), std::vector<double>(x.data(), x.data() + d)};
}

// Moves a refined feasible point to the polished one when that lowers the
// objective; if the polished point misses feasibility by rounding, keeps the
// feasible point closest to it on the joining segment.
void accept_polished(Evaluator& ev, Candidate& cand, const Candidate& polished) {
  const std::size_t d = cand.point.size();
  auto at = [&](double t) {
    std::vector<double> y(d);
    for (std::size_t i = 0; i < d; ++i) y[i] = cand.point[i] + t * (polished.point[i] - cand.point[i]);
    return y;
  };
  double lo = 0.0, hi = 1.0;
  std::vector<double> y = at(1.0);
  if (!(ev.load(y.data()) && ev.feasible())) {
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      y = at(mid);
      if (ev.load(y.data()) && ev.feasible()) lo = mid;
      else hi = mid;
    }
    y = at(lo);
  }
  if (!ev.load(y.data()) || !ev.feasible()) return;
  const double f = ev.objective();
  if (f < cand.value) cand = {f, y};
}

KlSumResult finish(Evaluator& ev, const Candidate& c) {
  KlSumResult r;
  r.feasible = true;
  ev.load(c.point.data());
  r.value = std::max(0.0, c.value);
  r.argmin = ev.classes();
  return r;
}

}  // namespace

void SimplexOptimizerSettings::validate() const {
  if (!(coarse_step > 0.0 && coarse_step <= 0.5)) throw std::invalid_argument("coarse step must lie in (0, 0.5]");
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (!(shrink > 0.0 && shrink < 1.0)) throw std::invalid_argument("shrink factor must lie in (0,1)");
  if (refinement_rounds < 0) throw std::invalid_argument("refinement rounds must be >= 0");
  if (max_coarse_points < 1 || starts < 1) throw std::invalid_argument("grid budget and starts must be positive");
}

bool TupleProblem::feasible(const std::vector<Distribution>& Q) const {
  const DistributionTuple t(Q);
  for (const auto& c : constraints) {
    if (c.kind == TupleConstraint::Kind::set_at_most) {
      if (g_set(t, c.C) > c.lambda + kFeasibilitySlack) return false;
    } else if (g_li_set(t, c.B).to_double() < g_li_set(t, c.C).to_double() - kFeasibilitySlack) {
      return false;
    }
  }
  return true;
}

double TupleProblem::objective(const std::vector<Distribution>& Q) const {
  DivergenceValue s(0.0);
  for (std::size_t j = 0; j < targets.size(); ++j) s += kl(Q[j], targets[j]);
  return s.to_double();
}

std::string ReducedProblem::key() const {
  const std::size_t C = classes.size();
  std::vector<std::size_t> order(constraints.size());
  std::iota(order.begin(), order.end(), 0);
  std::string best;
  bool first = true;
  do {
    std::vector<std::string> rows;
    for (std::size_t c = 0; c < C; ++c) {
      std::string row;
      for (const auto& t : classes[c]) {
        row += fmt_double(t.weight) + "*(";
        for (int x = 0; x < t.target.alphabet_size(); ++x) row += fmt_double(t.target[x]) + ",";
        row += ")";
      }
      for (std::size_t k : order) {
        const auto& con = constraints[k];
        row += "|";
        for (const auto& b : con.lhs) row += std::to_string(b.multiplicity[c]) + ",";
        row += "/";
        for (const auto& b : con.rhs) row += std::to_string(b.multiplicity[c]) + ",";
      }
      rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end());
    std::string k = "X=" + std::to_string(alphabet_size) + ";";
    for (std::size_t i : order)
      k += (constraints[i].dominance ? "ge;" : "le" + fmt_double(constraints[i].lambda) + ";");
    for (const auto& r : rows) k += r + "\n";
    if (first || k < best) best = k;
    first = false;
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

ReducedProblem reduce(const TupleProblem& problem) {
  const int M = problem.M();
  if (M < 1) throw std::invalid_argument("empty tuple problem");
  ReducedProblem r;
  r.alphabet_size = problem.targets.front().alphabet_size();

  std::vector<Subset> subsets;
  for (const auto& c : problem.constraints) {
    if (c.kind == TupleConstraint::Kind::li_dominates) subsets.push_back(c.B);
    subsets.push_back(c.C);
  }
  std::vector<int> target_id(static_cast<std::size_t>(M));
  std::vector<Distribution> distinct;
  for (int j = 0; j < M; ++j) {
    auto it = std::find(distinct.begin(), distinct.end(), problem.targets[static_cast<std::size_t>(j)]);
    if (it == distinct.end()) {
      distinct.push_back(problem.targets[static_cast<std::size_t>(j)]);
      it = distinct.end() - 1;
    }
    target_id[static_cast<std::size_t>(j)] = static_cast<int>(it - distinct.begin());
  }

  std::map<std::vector<int>, int> class_id;
  std::vector<int> counts;
  r.class_of_position.resize(static_cast<std::size_t>(M));
  for (int j = 0; j < M; ++j) {
    std::vector<int> sig{target_id[static_cast<std::size_t>(j)]};
    for (const auto& s : subsets) sig.push_back(s.contains(j) ? 1 : 0);
    auto [it, inserted] = class_id.try_emplace(sig, static_cast<int>(counts.size()));
    if (inserted) {
      counts.push_back(0);
      r.classes.push_back({{0.0, problem.targets[static_cast<std::size_t>(j)]}});
    }
    ++counts[static_cast<std::size_t>(it->second)];
    r.class_of_position[static_cast<std::size_t>(j)] = it->second;
  }
  for (std::size_t c = 0; c < counts.size(); ++c) r.classes[c].front().weight = counts[c];

  auto block = [&](const Subset& s) {
    ReducedProblem::Block b;
    b.multiplicity.assign(counts.size(), 0);
    for (int j = 0; j < M; ++j)
      if (s.contains(j)) ++b.multiplicity[static_cast<std::size_t>(r.class_of_position[static_cast<std::size_t>(j)])];
    return b;
  };
  for (const auto& c : problem.constraints) {
    ReducedProblem::Constraint rc;
    if (c.kind == TupleConstraint::Kind::set_at_most) {
      if (c.C.empty() || c.C.size() >= M) throw std::invalid_argument("constraint set must be a proper subset");
      rc.lhs = {block(c.C.complement(M)), block(c.C)};
      rc.lambda = c.lambda;
    } else {
      rc.lhs = {block(c.B.complement(M))};
      rc.rhs = {block(c.C.complement(M))};
      rc.dominance = true;
    }
    r.constraints.push_back(std::move(rc));
  }
  return r;
}

KlSumResult minimize_kl_sum(const ReducedProblem& problem, const SimplexOptimizerSettings& settings) {
  settings.validate();
  if (problem.alphabet_size < 2) throw std::invalid_argument("alphabet size must be >= 2");
  for (const auto& c : problem.constraints)
    if (!c.dominance && !(c.lambda >= 0.0)) throw std::invalid_argument("constraint level must be >= 0");
  Evaluator ev(problem);
  const int X = problem.alphabet_size;
  const int per = X - 1;
  const int d = ev.dims();
  const int active = d / per;

  // Objective is non-negative, so a feasible target point is optimal.
  if (auto tp = ev.target_point(); tp && ev.load(tp->data()) && ev.feasible())
    return finish(ev, {0.0, *tp});
  if (d == 0) {
    std::vector<double> none;
    ev.load(none.data());
    if (!ev.feasible()) return {};
    return finish(ev, {ev.objective(), none});
  }

  int n = std::max(1, static_cast<int>(std::lround(1.0 / settings.coarse_step)));
  while (n > 1 && grid_size(active, per, n) > settings.max_coarse_points) --n;
  const double h = 1.0 / n;

  std::vector<std::vector<int>> cls;
  std::vector<int> cur;
  simplex_grid(per, n, cur, cls, n);

  std::vector<Candidate> feasible_points;
  std::vector<std::size_t> idx(static_cast<std::size_t>(active), 0);
  std::vector<double> pt(static_cast<std::size_t>(d));
  for (;;) {
    for (int a = 0; a < active; ++a)
      for (int k = 0; k < per; ++k)
        pt[static_cast<std::size_t>(a * per + k)] = cls[idx[static_cast<std::size_t>(a)]][static_cast<std::size_t>(k)] * h;
    if (ev.load(pt.data())) {
      const double f = ev.objective();
      if (f < kInf && ev.feasible()) feasible_points.push_back({f, pt});
    }
    int a = 0;
    while (a < active && ++idx[static_cast<std::size_t>(a)] == cls.size()) idx[static_cast<std::size_t>(a++)] = 0;
    if (a == active) break;
  }
  if (feasible_points.empty()) return {};

  std::stable_sort(feasible_points.begin(), feasible_points.end(),
                   [](const Candidate& x, const Candidate& y) { return x.value < y.value; });
  std::vector<Candidate> starts;
  for (const auto& c : feasible_points) {
    bool separated = true;
    for (const auto& s : starts) {
      double dist = 0.0;
      for (int i = 0; i < d; ++i) dist = std::max(dist, std::abs(c.point[static_cast<std::size_t>(i)] - s.point[static_cast<std::size_t>(i)]));
      separated = separated && dist > 2.5 * h;
    }
    if (separated) starts.push_back(c);
    if (static_cast<int>(starts.size()) == settings.starts) break;
  }

  const double final_step = settings.coarse_step * std::pow(settings.shrink, settings.refinement_rounds);
  Candidate best{kInf, {}};
  for (auto& s : starts) {
    for (double step = h;; step *= settings.shrink) {
      refine(ev, s, step, settings.tolerance);
      if (step <= final_step * (1.0 + 1e-9)) break;
    }
    accept_polished(ev, s, polish(ev, s, per));
    if (s.value < best.value) best = s;
  }
  return finish(ev, best);
}

KlSumResult minimize_kl_sum(const TupleProblem& problem, const SimplexOptimizerSettings& settings) {
  const ReducedProblem r = reduce(problem);
  KlSumResult res = minimize_kl_sum(r, settings);
  if (!res.feasible) return res;
  std::vector<Distribution> full;
  for (int j = 0; j < problem.M(); ++j) full.push_back(res.argmin[static_cast<std::size_t>(r.class_of_position[static_cast<std::size_t>(j)])]);
  res.argmin = std::move(full);
  return res;
}

KlSumResult brute_force_tuple_oracle(const TupleProblem& problem, double grid_step) {
  const int M = problem.M();
  if (M < 1 || M > 4) throw std::invalid_argument("brute-force oracle supports M <= 4");
  for (const auto& t : problem.targets)
    if (t.alphabet_size() != 2) throw std::invalid_argument("brute-force oracle supports the binary alphabet only");
  if (!(grid_step >= 0.005 && grid_step <= 0.5)) throw std::invalid_argument("grid step must lie in [0.005, 0.5]");
  const int n = static_cast<int>(std::lround(1.0 / grid_step));
  const double points = std::pow(n + 1.0, M);
  if (points > 1e9) throw std::length_error("brute-force grid exceeds 1e9 points");

  // One class per position: no symmetry is exploited.
  ReducedProblem r;
  r.alphabet_size = 2;
  for (int j = 0; j < M; ++j) r.classes.push_back({{1.0, problem.targets[static_cast<std::size_t>(j)]}});
  auto block = [&](const Subset& s) {
    ReducedProblem::Block b;
    b.multiplicity.assign(static_cast<std::size_t>(M), 0);
    for (int j = 0; j < M; ++j) b.multiplicity[static_cast<std::size_t>(j)] = s.contains(j) ? 1 : 0;
    return b;
  };
  for (const auto& c : problem.constraints) {
    ReducedProblem::Constraint rc;
    if (c.kind == TupleConstraint::Kind::set_at_most) {
      rc.lhs = {block(c.C.complement(M)), block(c.C)};
      rc.lambda = c.lambda;
    } else {
      rc.lhs = {block(c.B.complement(M))};
      rc.rhs = {block(c.C.complement(M))};
      rc.dominance = true;
    }
    r.constraints.push_back(std::move(rc));
  }
  Evaluator ev(r);
  // Positions outside all blocks are inactive in the evaluator and sit at their target,
  // which is their exact unconstrained optimum.
  const int d = ev.dims();
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  std::vector<double> pt(static_cast<std::size_t>(d));
  Candidate best{kInf, {}};
  for (;;) {
    for (int i = 0; i < d; ++i) pt[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i)] == n ? 1.0 : idx[static_cast<std::size_t>(i)] / static_cast<double>(n);
    ev.load(pt.data());
    const double f = ev.objective();
    if (f < best.value && ev.feasible()) best = {f, pt};
    int i = 0;
    while (i < d && ++idx[static_cast<std::size_t>(i)] > n) idx[static_cast<std::size_t>(i++)] = 0;
    if (i == d) break;
  }
  if (best.value == kInf) return {};
  return finish(ev, best);
}

}  // namespace outlier
