#ifndef NOMASCMA_CONVEX_GP_HPP
#define NOMASCMA_CONVEX_GP_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "nomascma/convex/agma.hpp"

namespace nomascma::convex {

/// c * prod_j x_j^{a_j}, exponents stored sparsely.
struct Monomial {
  double coeff = 1.0;
  std::vector<std::pair<std::size_t, double>> powers;

  double eval(std::span<const double> x) const {
    double log_v = std::log(coeff);
    for (const auto& [j, a] : powers) log_v += a * std::log(x[j]);
    return std::exp(log_v);
  }
};

struct Posynomial {
  std::vector<Monomial> terms;

  double eval(std::span<const double> x) const {
    double s = 0.0;
    for (const auto& t : terms) s += t.eval(x);
    return s;
  }
};

/// Monomial lower bound of a posynomial that is tight at `anchor`.
inline Monomial condense(const Posynomial& p, std::span<const double> anchor) {
  if (p.terms.empty()) throw std::invalid_argument("condense: empty posynomial");
  std::vector<double> values;
  values.reserve(p.terms.size());
  for (const auto& t : p.terms) values.push_back(t.eval(anchor));
  const auto agma = agma_condense(values, values);

  // prod_i (c_i x^{a_i} / u_i)^{u_i}
  Monomial out;
  double log_c = 0.0;
  std::vector<std::pair<std::size_t, double>> acc;
  for (std::size_t i = 0; i < p.terms.size(); ++i) {
    const double u = agma.weights[i];
    log_c += u * (std::log(p.terms[i].coeff) - std::log(u));
    for (const auto& [j, a] : p.terms[i].powers) acc.emplace_back(j, u * a);
  }
  std::sort(acc.begin(), acc.end());
  for (const auto& [j, a] : acc) {
    if (!out.powers.empty() && out.powers.back().first == j)
      out.powers.back().second += a;
    else
      out.powers.emplace_back(j, a);
  }
  out.coeff = std::exp(log_c);
  return out;
}

/// Posynomial divided by a monomial.
inline Posynomial divide(const Posynomial& p, const Monomial& d) {
  Posynomial out;
  out.terms.reserve(p.terms.size());
  for (const auto& t : p.terms) {
    Monomial m;
    m.coeff = t.coeff / d.coeff;
    m.powers = t.powers;
    for (const auto& [j, a] : d.powers) {
      auto it = std::find_if(m.powers.begin(), m.powers.end(), [j = j](const auto& e) { return e.first == j; });
      if (it != m.powers.end())
        it->second -= a;
      else
        m.powers.emplace_back(j, -a);
    }
    out.terms.push_back(std::move(m));
  }
  return out;
}

/// minimize prod_k objective[k](x)  s.t. constraints[i](x) <= 1, lower <= x <= upper.
///
/// The objective is kept as a product of posynomial factors; the product is
/// itself a posynomial but expanding it would blow up the term count.
struct GpProblem {
  std::size_t num_vars = 0;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<Posynomial> objective;
  std::vector<Posynomial> constraints;

  void validate() const {
    if (num_vars == 0) throw std::invalid_argument("GpProblem: needs at least one variable");
    if (lower.size() != num_vars || upper.size() != num_vars)
      throw std::invalid_argument("GpProblem: bounds must cover every variable");
    for (std::size_t j = 0; j < num_vars; ++j)
      if (!(lower[j] > 0.0) || !(lower[j] <= upper[j]) || !std::isfinite(upper[j]))
        throw std::invalid_argument("GpProblem: bounds must satisfy 0 < lo <= hi < inf");
    if (objective.empty()) throw std::invalid_argument("GpProblem: empty objective");
    auto check = [this](const Posynomial& p) {
      if (p.terms.empty()) throw std::invalid_argument("GpProblem: empty posynomial");
      for (const auto& t : p.terms) {
        if (!(t.coeff > 0.0) || !std::isfinite(t.coeff))
          throw std::invalid_argument("GpProblem: coefficients must be positive");
        for (const auto& [j, a] : t.powers)
          if (j >= num_vars || !std::isfinite(a)) throw std::invalid_argument("GpProblem: bad exponent");
      }
    };
    for (const auto& p : objective) check(p);
    for (const auto& p : constraints) check(p);
  }

  double objective_value(std::span<const double> x) const {
    double log_v = 0.0;
    for (const auto& p : objective) log_v += std::log(p.eval(x));
    return std::exp(log_v);
  }

  double max_constraint(std::span<const double> x) const {
    double worst = 0.0;
    for (const auto& p : constraints) worst = std::max(worst, p.eval(x));
    return worst;
  }
};

struct GpOptions {
  double tol = 1e-6;
  std::size_t max_iter = 500;  // Newton steps across all barrier rounds
  double initial_barrier = 1.0;
  double barrier_factor = 0.2;  // mu shrinks by this factor after each centering
};

enum class GpStatus { converged, max_iterations, infeasible };

struct GpResult {
  GpStatus status = GpStatus::infeasible;
  std::vector<double> x;
  double objective = std::numeric_limits<double>::infinity();
  double residual = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  std::string message;

  bool ok() const { return status != GpStatus::infeasible; }
};

namespace detail {

// A posynomial in log variables y = log x, restricted to the free variables it
// touches: common . y_local + log sum_j exp(b_j + a_j . y_local). Exponents
// shared by most terms (as after dividing by a monomial) live in `common`,
// which keeps the per-term vectors a_j sparse.
struct LogPosynomial {
  std::vector<int> vars;
  std::vector<double> common;
  std::vector<double> b;
  std::vector<std::vector<std::pair<int, double>>> a;
};

struct LseEval {
  double value = 0.0;
  Eigen::VectorXd grad;  // local
  Eigen::MatrixXd hess;  // local
};

class BarrierEngine {
public:
  BarrierEngine(const GpProblem& problem, std::span<const double> fixed_log)
      : n_total_(problem.num_vars) {
    free_index_.assign(n_total_, -1);
    for (std::size_t j = 0; j < n_total_; ++j) {
      if (problem.lower[j] < problem.upper[j]) {
        free_index_[j] = static_cast<int>(free_.size());
        free_.push_back(j);
        lo_.push_back(std::log(problem.lower[j]));
        hi_.push_back(std::log(problem.upper[j]));
      }
    }
    fixed_log_.assign(fixed_log.begin(), fixed_log.end());
    for (const auto& p : problem.objective) objective_.push_back(compile(p));
    for (const auto& p : problem.constraints) constraints_.push_back(compile(p));
  }

  std::size_t num_free() const { return free_.size(); }
  std::size_t barrier_terms() const { return constraints_.size() + 2 * free_.size(); }
  const std::vector<std::size_t>& free_vars() const { return free_; }
  double lo(std::size_t k) const { return lo_[k]; }
  double hi(std::size_t k) const { return hi_[k]; }

  double constraint_lse(std::size_t i, const Eigen::VectorXd& y) const { return lse(constraints_[i], y); }
  std::size_t num_constraints() const { return constraints_.size(); }

  bool strictly_feasible(const Eigen::VectorXd& y) const {
    for (Eigen::Index k = 0; k < y.size(); ++k)
      if (!(y[k] > lo_[k] && y[k] < hi_[k])) return false;
    for (const auto& c : constraints_)
      if (!(lse(c, y) < 0.0)) return false;
    return true;
  }

  double objective_log(const Eigen::VectorXd& y) const {
    double v = 0.0;
    for (const auto& p : objective_) v += lse(p, y);
    return v;
  }

  /// objective + mu * barrier; +inf outside the domain.
  double merit(const Eigen::VectorXd& y, double mu) const {
    double barrier = 0.0;
    for (Eigen::Index k = 0; k < y.size(); ++k) {
      const double dl = y[k] - lo_[k];
      const double dh = hi_[k] - y[k];
      if (!(dl > 0.0) || !(dh > 0.0)) return std::numeric_limits<double>::infinity();
      barrier -= std::log(dl) + std::log(dh);
    }
    for (const auto& c : constraints_) {
      const double v = lse(c, y);
      if (!(v < 0.0)) return std::numeric_limits<double>::infinity();
      barrier -= std::log(-v);
    }
    return objective_log(y) + mu * barrier;
  }

  /// Gradient and Hessian of the merit; only the lower triangle of H is filled.
  void derivatives(const Eigen::VectorXd& y, double mu, Eigen::VectorXd& g, Eigen::MatrixXd& H) const {
    const auto n = static_cast<Eigen::Index>(free_.size());
    g.setZero(n);
    H.setZero(n, n);
    LseEval e;
    for (const auto& p : objective_) {
      lse_full(p, y, e);
      scatter(p, e.grad, e.hess, 1.0, g, H);
    }
    for (const auto& c : constraints_) {
      lse_full(c, y, e);
      // -log(-v): grad = g/(-v), hess = H/(-v) + g g^T / v^2
      const double s = -e.value;
      e.hess /= s;
      e.hess.selfadjointView<Eigen::Lower>().rankUpdate(e.grad, 1.0 / (s * s));
      e.grad /= s;
      scatter(c, e.grad, e.hess, mu, g, H);
    }
    for (Eigen::Index k = 0; k < n; ++k) {
      const double dl = y[k] - lo_[k];
      const double dh = hi_[k] - y[k];
      g[k] += mu * (-1.0 / dl + 1.0 / dh);
      H(k, k) += mu * (1.0 / (dl * dl) + 1.0 / (dh * dh));
    }
  }

  std::vector<double> to_x(const Eigen::VectorXd& y) const {
    std::vector<double> x(n_total_);
    for (std::size_t j = 0; j < n_total_; ++j) x[j] = std::exp(fixed_log_[j]);
    for (std::size_t k = 0; k < free_.size(); ++k) x[free_[k]] = std::exp(y[static_cast<Eigen::Index>(k)]);
    return x;
  }

private:
  LogPosynomial compile(const Posynomial& p) const {
    LogPosynomial out;
    std::vector<int> local(n_total_, -1);
    std::vector<std::vector<std::pair<int, double>>> dense_terms;
    for (const auto& t : p.terms) {
      double b = std::log(t.coeff);
      std::vector<std::pair<int, double>> a;
      for (const auto& [j, e] : t.powers) {
        if (e == 0.0) continue;
        const int fi = free_index_[j];
        if (fi < 0) {
          b += e * fixed_log_[j];
          continue;
        }
        if (local[fi] < 0) {
          local[fi] = static_cast<int>(out.vars.size());
          out.vars.push_back(fi);
        }
        a.emplace_back(local[fi], e);
      }
      out.b.push_back(b);
      dense_terms.push_back(std::move(a));
    }
    // Most frequent exponent of each variable across terms (absent counts as 0).
    const std::size_t k = out.vars.size(), T = dense_terms.size();
    std::vector<std::vector<double>> expo(k, std::vector<double>(T, 0.0));
    for (std::size_t t = 0; t < T; ++t)
      for (const auto& [l, e] : dense_terms[t]) expo[static_cast<std::size_t>(l)][t] += e;
    out.common.assign(k, 0.0);
    for (std::size_t l = 0; l < k; ++l) {
      auto v = expo[l];
      std::sort(v.begin(), v.end());
      std::size_t best_run = 0;
      for (std::size_t i = 0; i < v.size();) {
        std::size_t j = i;
        while (j < v.size() && v[j] == v[i]) ++j;
        if (j - i > best_run || (j - i == best_run && v[i] == 0.0)) {
          best_run = j - i;
          out.common[l] = v[i];
        }
        i = j;
      }
    }
    // Local order follows the global free index so local lower-triangle
    // entries land in the global lower triangle.
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return out.vars[a] < out.vars[b]; });
    LogPosynomial sorted;
    sorted.b = std::move(out.b);
    sorted.a.resize(T);
    for (std::size_t l = 0; l < k; ++l) {
      sorted.vars.push_back(out.vars[perm[l]]);
      sorted.common.push_back(out.common[perm[l]]);
    }
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t l = 0; l < k; ++l) {
        const double r = expo[perm[l]][t] - sorted.common[l];
        if (r != 0.0) sorted.a[t].emplace_back(static_cast<int>(l), r);
      }
    return sorted;
  }

  static double lse(const LogPosynomial& p, const Eigen::VectorXd& y) {
    double mx = -std::numeric_limits<double>::infinity();
    thread_local std::vector<double> z;
    z.resize(p.b.size());
    for (std::size_t t = 0; t < p.b.size(); ++t) {
      double v = p.b[t];
      for (const auto& [l, e] : p.a[t]) v += e * y[p.vars[static_cast<std::size_t>(l)]];
      z[t] = v;
      mx = std::max(mx, v);
    }
    double s = 0.0;
    for (double v : z) s += std::exp(v - mx);
    double lin = 0.0;
    for (std::size_t l = 0; l < p.common.size(); ++l) lin += p.common[l] * y[p.vars[l]];
    return lin + mx + std::log(s);
  }

  static void lse_full(const LogPosynomial& p, const Eigen::VectorXd& y, LseEval& out) {
    const auto k = static_cast<Eigen::Index>(p.vars.size());
    thread_local std::vector<double> w;
    w.resize(p.b.size());
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < p.b.size(); ++t) {
      double v = p.b[t];
      for (const auto& [l, e] : p.a[t]) v += e * y[p.vars[static_cast<std::size_t>(l)]];
      w[t] = v;
      mx = std::max(mx, v);
    }
    double s = 0.0;
    for (auto& v : w) {
      v = std::exp(v - mx);
      s += v;
    }
    out.value = mx + std::log(s);
    out.grad.setZero(k);
    out.hess.setZero(k, k);
    for (std::size_t t = 0; t < p.b.size(); ++t) {
      const double wt = w[t] / s;
      if (wt == 0.0) continue;
      for (const auto& [l, e] : p.a[t]) {
        out.grad[l] += wt * e;
        for (const auto& [l2, e2] : p.a[t])
          if (l2 <= l) out.hess(l, l2) += wt * e * e2;
      }
    }
    out.hess.selfadjointView<Eigen::Lower>().rankUpdate(out.grad, -1.0);
    for (Eigen::Index l = 0; l < k; ++l) {
      out.value += p.common[static_cast<std::size_t>(l)] * y[p.vars[static_cast<std::size_t>(l)]];
      out.grad[l] += p.common[static_cast<std::size_t>(l)];
    }
  }

  static void scatter(const LogPosynomial& p, const Eigen::VectorXd& gl, const Eigen::MatrixXd& hl, double scale,
                      Eigen::VectorXd& g, Eigen::MatrixXd& H) {
    const auto k = p.vars.size();
    for (std::size_t i = 0; i < k; ++i) {
      const auto gi = static_cast<Eigen::Index>(i);
      g[p.vars[i]] += scale * gl[gi];
      for (std::size_t j = 0; j <= i; ++j) H(p.vars[i], p.vars[j]) += scale * hl(gi, static_cast<Eigen::Index>(j));
    }
  }

  std::size_t n_total_;
  std::vector<int> free_index_;
  std::vector<std::size_t> free_;
  std::vector<double> lo_, hi_, fixed_log_;
  std::vector<LogPosynomial> objective_;
  std::vector<LogPosynomial> constraints_;
};

struct BarrierRun {
  Eigen::VectorXd y;
  std::size_t iterations = 0;
  double mu = 0.0;
  bool converged = false;
  bool stopped_early = false;
};

// Barrier path following with damped Newton centering.
inline BarrierRun run_barrier(const BarrierEngine& eng, Eigen::VectorXd y, const GpOptions& opt,
                              const std::function<bool(const Eigen::VectorXd&)>& stop_when = {}) {
  BarrierRun run;
  const auto n = static_cast<Eigen::Index>(eng.num_free());
  const double m = static_cast<double>(eng.barrier_terms());
  double mu = opt.initial_barrier;
  Eigen::VectorXd g(n), d(n);
  Eigen::MatrixXd H(n, n);
  Eigen::LLT<Eigen::MatrixXd> llt;
  constexpr double kCenterTol = 1e-9;
  constexpr std::size_t kMaxCentering = 60;

  while (true) {
    for (std::size_t inner = 0; inner < kMaxCentering; ++inner) {
      if (run.iterations >= opt.max_iter) {
        run.y = std::move(y);
        run.mu = mu;
        return run;
      }
      eng.derivatives(y, mu, g, H);
      llt.compute(H);
      double ridge = 1e-12 * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
      while (llt.info() != Eigen::Success) {
        Eigen::MatrixXd Hr = H;
        Hr.diagonal().array() += ridge;
        llt.compute(Hr);
        ridge *= 10.0;
      }
      d = llt.solve(-g);
      const double decrement2 = -g.dot(d);
      ++run.iterations;
      const double f0 = eng.merit(y, mu);
      if (decrement2 / 2.0 <= kCenterTol * std::max(1.0, std::abs(f0))) break;

      double s = 1.0;
      Eigen::VectorXd trial;
      bool moved = false;
      double f1 = f0;
      for (int ls = 0; ls < 60; ++ls, s *= 0.5) {
        trial = y + s * d;
        f1 = eng.merit(trial, mu);
        if (std::isfinite(f1) && f1 <= f0 - 0.25 * s * decrement2) {
          moved = true;
          break;
        }
      }
      if (!moved) break;
      // Progress below roundoff of the merit: centered as well as doubles allow.
      const bool negligible = f0 - f1 <= 1e-13 * std::max(1.0, std::abs(f0));
      y = std::move(trial);
      if (stop_when && stop_when(y)) {
        run.y = std::move(y);
        run.mu = mu;
        run.stopped_early = true;
        return run;
      }
      if (negligible) break;
    }
    if (m * mu <= opt.tol) {
      run.converged = true;
      break;
    }
    mu = std::max(mu * opt.barrier_factor, 0.5 * opt.tol / m);
  }
  run.y = std::move(y);
  run.mu = mu;
  return run;
}

}  // namespace detail

/// Solves a geometric program in log variables with a log-barrier method.
///
/// `start` may be infeasible; a phase-1 problem that minimizes a common slack
/// on all constraints then searches for a strictly feasible point.
inline GpResult solve_gp(const GpProblem& problem, std::span<const double> start = {},
                         const GpOptions& opt = {}) {
  problem.validate();
  const std::size_t nv = problem.num_vars;

  std::vector<double> fixed_log(nv);
  std::vector<double> x0(nv);
  for (std::size_t j = 0; j < nv; ++j) {
    const double guess = start.size() == nv && start[j] > 0.0 ? start[j] : std::sqrt(problem.lower[j] * problem.upper[j]);
    x0[j] = guess;
    fixed_log[j] = std::log(problem.lower[j]);
  }

  detail::BarrierEngine eng(problem, fixed_log);
  const auto n = static_cast<Eigen::Index>(eng.num_free());
  Eigen::VectorXd y(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double lo = eng.lo(static_cast<std::size_t>(k));
    const double hi = eng.hi(static_cast<std::size_t>(k));
    const double margin = std::min(1e-3, 0.25 * (hi - lo));
    y[k] = std::clamp(std::log(x0[eng.free_vars()[static_cast<std::size_t>(k)]]), lo + margin, hi - margin);
  }

  GpResult result;
  std::size_t phase1_iters = 0;

  auto feasible_with_margin = [&](const Eigen::VectorXd& yy) {
    for (std::size_t i = 0; i < eng.num_constraints(); ++i)
      if (!(eng.constraint_lse(i, yy) < 0.0)) return false;
    return true;
  };

  if (!feasible_with_margin(y)) {
    // Phase 1: minimize z s.t. c_i(x) / z <= 1, slack variable appended last.
    GpProblem p1;
    p1.num_vars = nv + 1;
    p1.lower = problem.lower;
    p1.upper = problem.upper;
    double worst = 0.0;
    {
      const auto xs = eng.to_x(y);
      worst = problem.max_constraint(xs);
    }
    p1.lower.push_back(1e-3);
    p1.upper.push_back(std::max(4.0, 4.0 * worst));
    p1.objective.push_back(Posynomial{{Monomial{1.0, {{nv, 1.0}}}}});
    for (const auto& c : problem.constraints) {
      Posynomial pc = c;
      for (auto& t : pc.terms) t.powers.emplace_back(nv, -1.0);
      p1.constraints.push_back(std::move(pc));
    }
    std::vector<double> fl1 = fixed_log;
    fl1.push_back(std::log(p1.lower.back()));
    detail::BarrierEngine eng1(p1, fl1);
    Eigen::VectorXd y1(static_cast<Eigen::Index>(eng1.num_free()));
    // Free variables of p1 are the free variables of p followed by the slack.
    y1.head(n) = y;
    y1[n] = std::log(std::max(2.0, 2.0 * worst));
    auto stop = [&](const Eigen::VectorXd& yy) { return feasible_with_margin(Eigen::VectorXd(yy.head(n))) && yy[n] < -1e-6; };
    GpOptions o1 = opt;
    o1.tol = 1e-8;
    auto run1 = detail::run_barrier(eng1, y1, o1, stop);
    phase1_iters = run1.iterations;
    Eigen::VectorXd yc = run1.y.head(n);
    if (!feasible_with_margin(yc)) {
      result.status = GpStatus::infeasible;
      result.x = eng.to_x(yc);
      result.iterations = phase1_iters;
      result.message = "phase 1 could not find a strictly feasible point (max constraint " +
                       std::to_string(problem.max_constraint(result.x)) + ")";
      return result;
    }
    y = yc;
  }

  GpOptions o2 = opt;
  o2.max_iter = opt.max_iter > phase1_iters ? opt.max_iter - phase1_iters : 1;
  auto run = detail::run_barrier(eng, y, o2);
  result.x = eng.to_x(run.y);
  result.objective = problem.objective_value(result.x);
  result.iterations = phase1_iters + run.iterations;
  result.residual = static_cast<double>(eng.barrier_terms()) * run.mu;
  result.status = run.converged ? GpStatus::converged : GpStatus::max_iterations;
  if (!run.converged) result.message = "iteration cap reached; best iterate returned";
  return result;
}

}  // namespace nomascma::convex

#endif  // NOMASCMA_CONVEX_GP_HPP
