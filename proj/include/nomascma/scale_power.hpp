#ifndef NOMASCMA_SCALE_POWER_HPP
#define NOMASCMA_SCALE_POWER_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "nomascma/convex/dual.hpp"
#include "nomascma/convex/scale.hpp"
#include "nomascma/hetnet.hpp"
#include "nomascma/solver_config.hpp"

// SCALE outer loop and dual inner loop shared by the NOMA and SCMA power
// allocators. A model exposes a matrix of (user, resource) entries where
// resource is a subcarrier (NOMA) or a codebook (SCMA):
//
//   const ChannelState& channels() const;
//   Eigen::Index rows() const, cols() const;
//   bool active(Eigen::Index i, Eigen::Index j) const;
//   std::size_t owner(Eigen::Index i) const;               // serving BS of row i
//   Eigen::MatrixXd sinr(const Eigen::MatrixXd& p) const;  // 0 on inactive entries
//   Eigen::MatrixXd closed_form(const Eigen::MatrixXd& p, const Eigen::MatrixXd& alpha,
//                               const convex::DualState& duals, double p_floor) const;
//   void coordinate_sweep(Eigen::MatrixXd& p, const Eigen::MatrixXd& alpha,
//                         const convex::DualState& duals, double p_floor) const;
//
// closed_form evaluates the stationarity condition for every entry at once
// (Jacobi); coordinate_sweep solves each entry's condition exactly in its own
// power with the latest values of the others (Gauss-Seidel). Both share the
// same fixed points.

namespace nomascma {

/// Receiver whose interference-plus-noise denominator D = coupling * p + rest
/// depends on the power p being solved for.
struct Victim {
  double alpha = 0.0;
  double coupling = 0.0;
  double rest = 0.0;
};

/// Solves p * (lambda + sum_k alpha_k c_k / (c_k p + e_k)) = alpha for p,
/// clamped to [p_floor, p_cap]. The left side is increasing in p, so the root
/// is unique; safeguarded Newton in log p.
inline double solve_stationary_power(double alpha, double lambda, const std::vector<Victim>& victims, double p_start,
                                     double p_floor, double p_cap) {
  auto h = [&](double p, double& dh) {
    double s = lambda, ds = lambda;
    for (const auto& v : victims) {
      const double d = v.coupling * p + v.rest;
      s += v.alpha * v.coupling / d;
      ds += v.alpha * v.coupling * v.rest / (d * d);
    }
    dh = ds;  // d/dp of p * s
    return p * s;
  };
  double dh = 0.0;
  if (h(p_cap, dh) <= alpha) return p_cap;
  if (h(p_floor, dh) >= alpha) return p_floor;
  double lo = std::log(p_floor), hi = std::log(p_cap);
  double q = std::log(std::clamp(p_start, p_floor, p_cap));
  for (int it = 0; it < 100; ++it) {
    const double p = std::exp(q);
    const double r = h(p, dh) - alpha;
    if (r > 0.0)
      hi = q;
    else
      lo = q;
    if (std::abs(r) <= 1e-14 * alpha || hi - lo <= 1e-15) break;
    double next = q - r / (dh * p);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    q = next;
  }
  return std::exp(q);
}

/// SCALE coefficients for every (user, resource) entry.
struct CoeffGrid {
  Eigen::MatrixXd alpha;
  Eigen::MatrixXd beta;

  static CoeffGrid high_sinr(Eigen::Index rows, Eigen::Index cols) {
    return {Eigen::MatrixXd::Ones(rows, cols), Eigen::MatrixXd::Zero(rows, cols)};
  }

  /// Re-tightens every entry at z0 = gamma(i, j); entries with gamma = 0 keep
  /// their coefficients.
  void retighten(const Eigen::MatrixXd& gamma) {
    for (Eigen::Index i = 0; i < gamma.rows(); ++i)
      for (Eigen::Index j = 0; j < gamma.cols(); ++j)
        if (gamma(i, j) > 0.0) {
          const auto c = convex::scale_coeffs(gamma(i, j));
          alpha(i, j) = c.alpha;
          beta(i, j) = c.beta;
        }
  }
};

/// sum over active entries of alpha log(gamma) + beta.
template <class Model>
double surrogate_objective(const Model& model, const Eigen::MatrixXd& gamma, const CoeffGrid& c) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < model.rows(); ++i)
    for (Eigen::Index j = 0; j < model.cols(); ++j)
      if (model.active(i, j)) s += c.alpha(i, j) * std::log(gamma(i, j)) + c.beta(i, j);
  return s;
}

inline double sum_log1p(const Eigen::MatrixXd& gamma) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < gamma.size(); ++k) s += std::log1p(gamma.data()[k]);
  return s;
}

template <class Model>
std::vector<double> consumed_power(const Model& model, const Eigen::MatrixXd& p) {
  std::vector<double> used(model.channels().num_bs(), 0.0);
  for (Eigen::Index i = 0; i < model.rows(); ++i)
    for (Eigen::Index j = 0; j < model.cols(); ++j)
      if (model.active(i, j)) used[model.owner(i)] += p(i, j);
  return used;
}

/// Zeroes inactive entries, floors active ones, and scales each BS down onto
/// its budget when it overspends.
template <class Model>
Eigen::MatrixXd project_feasible(const Model& model, Eigen::MatrixXd p, double p_floor) {
  for (Eigen::Index i = 0; i < model.rows(); ++i)
    for (Eigen::Index j = 0; j < model.cols(); ++j)
      p(i, j) = model.active(i, j) ? std::max(p(i, j), p_floor) : 0.0;
  const auto used = consumed_power(model, p);
  for (Eigen::Index i = 0; i < model.rows(); ++i) {
    const auto f = model.owner(i);
    const double cap = model.channels().p_max(f);
    if (used[f] > cap) p.row(i) *= cap / used[f];
  }
  return p;
}

/// Result of maximizing one SCALE surrogate with the dual method.
struct SurrogateSolve {
  Eigen::MatrixXd p;  // raw stationary point, before feasibility projection
  convex::DualState duals;
  CoeffGrid coeffs;
  bool converged = false;
  bool diverging = false;  // cap hit while the budget residual was still growing
  std::size_t iterations = 0;
};

struct PowerAllocation {
  Eigen::MatrixXd p;  // best feasible iterate
  double sum_rate = 0.0;
  SurrogateSolve last;
  std::size_t rounds = 0;
  std::size_t dual_iterations = 0;
  bool converged = false;  // every dual loop met its stopping rule
  bool warning = false;    // some dual loop hit its cap with a growing residual
  std::vector<double> round_rates;
};

/// Initial multipliers: sum of alpha over the BS's active entries divided by
/// its budget, which is exact when there is no interference.
template <class Model>
std::vector<double> initial_multipliers(const Model& model, const CoeffGrid& c) {
  std::vector<double> lambda(model.channels().num_bs(), 0.0);
  for (Eigen::Index i = 0; i < model.rows(); ++i)
    for (Eigen::Index j = 0; j < model.cols(); ++j)
      if (model.active(i, j)) lambda[model.owner(i)] += c.alpha(i, j);
  for (std::size_t f = 0; f < lambda.size(); ++f) lambda[f] /= model.channels().p_max(f);
  return lambda;
}

/// Alternates stationarity sweeps over the powers with projected subgradient
/// steps on the budget multipliers until both settle.
template <class Model>
SurrogateSolve solve_surrogate(const Model& model, Eigen::MatrixXd p, convex::DualState duals, const CoeffGrid& coeffs,
                               const SolverConfig& cfg) {
  const auto& st = model.channels();
  const std::size_t F = st.num_bs();
  std::vector<double> lambda_ref = initial_multipliers(model, coeffs);
  if (duals.lambda.size() != F) duals = convex::DualState(lambda_ref, cfg.step);

  SurrogateSolve out;
  out.coeffs = coeffs;
  std::vector<double> residual(F);
  double last_res_norm = std::numeric_limits<double>::infinity();
  bool growing = false;
  for (std::size_t t = 0; t < cfg.dual_iters; ++t) {
    Eigen::MatrixXd p_new = p;
    model.coordinate_sweep(p_new, coeffs.alpha, duals, cfg.p_floor);
    const auto used = consumed_power(model, p_new);
    double res_norm = 0.0;
    for (std::size_t f = 0; f < F; ++f) {
      residual[f] = st.p_max(f) - used[f];
      res_norm = std::max(res_norm, std::abs(residual[f]) / st.p_max(f));
      const double scale = std::max({duals.lambda[f], 1e-3 * lambda_ref[f], 1e-300});
      duals.step[f] = cfg.step * scale / st.p_max(f);
    }
    auto next = convex::subgradient_update(duals, residual);

    double dl = 0.0;
    for (std::size_t f = 0; f < F; ++f) dl = std::max(dl, std::abs(next.lambda[f] - duals.lambda[f]));
    double dp = 0.0;
    for (Eigen::Index k = 0; k < p_new.size(); ++k) {
      const double a = p_new.data()[k], b = p.data()[k];
      const double scale = std::max(a, b);
      if (scale > 0.0) dp = std::max(dp, std::abs(a - b) / scale);
    }
    p = std::move(p_new);
    duals = std::move(next);
    out.iterations = t + 1;
    growing = res_norm > last_res_norm;
    last_res_norm = res_norm;
    if (dl <= cfg.dual_tol && dp <= cfg.fixed_point_tol) {
      out.converged = true;
      break;
    }
  }
  out.diverging = !out.converged && growing;
  out.p = std::move(p);
  out.duals = std::move(duals);
  out.duals.iteration = out.iterations;
  return out;
}

/// SCALE loop: start from the high-SINR coefficients, solve the convexified
/// problem, re-tighten at the achieved SINRs, and keep the best feasible
/// iterate by true sum-rate.
template <class Model>
PowerAllocation scale_power_allocation(const Model& model, const Eigen::MatrixXd& p_init, const SolverConfig& cfg) {
  cfg.validate();
  PowerAllocation out;
  Eigen::MatrixXd p = project_feasible(model, p_init, cfg.p_floor);
  out.p = p;
  out.sum_rate = sum_log1p(model.sinr(p));

  CoeffGrid coeffs = CoeffGrid::high_sinr(model.rows(), model.cols());
  convex::DualState duals;
  out.converged = true;
  Eigen::MatrixXd prev_round;
  for (std::size_t s = 0; s < cfg.inner_rounds; ++s) {
    auto sol = solve_surrogate(model, p, duals, coeffs, cfg);
    out.dual_iterations += sol.iterations;
    out.converged = out.converged && sol.converged;
    out.warning = out.warning || sol.diverging;
    duals = sol.duals;
    p = project_feasible(model, sol.p, cfg.p_floor);
    const Eigen::MatrixXd gamma = model.sinr(p);
    const double rate = sum_log1p(gamma);
    out.round_rates.push_back(rate);
    if (rate > out.sum_rate) {
      out.sum_rate = rate;
      out.p = p;
    }
    out.last = std::move(sol);
    out.rounds = s + 1;

    if (prev_round.size() == p.size()) {
      double change = 0.0;
      for (Eigen::Index k = 0; k < p.size(); ++k) {
        const double a = p.data()[k], b = prev_round.data()[k];
        if (std::max(a, b) > 0.0) change = std::max(change, std::abs(a - b) / std::max(a, b));
      }
      if (change <= 1e-6) break;
    }
    prev_round = p;
    coeffs.retighten(gamma);
  }
  return out;
}

}  // namespace nomascma

#endif  // NOMASCMA_SCALE_POWER_HPP
