#ifndef NOMASCMA_NOMA_HPP
#define NOMASCMA_NOMA_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nomascma/convex/dual.hpp"
#include "nomascma/convex/gp.hpp"
#include "nomascma/hetnet.hpp"
#include "nomascma/scale_power.hpp"
#include "nomascma/solver_config.hpp"

namespace nomascma::noma {

enum class AssignmentMode { binary, relaxed };

/// Subcarrier map rho(m, n) of user m (served by its own BS) on subcarrier n.
struct NomaAssignment {
  Eigen::MatrixXd rho;
  AssignmentMode mode = AssignmentMode::binary;

  static NomaAssignment zeros(const ChannelState& st, AssignmentMode mode) {
    return {Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(st.num_users()),
                                  static_cast<Eigen::Index>(st.num_subcarriers())),
            mode};
  }
};

/// Transmit power p(m, n) from the serving BS of m on subcarrier n, in watts.
struct NomaPower {
  Eigen::MatrixXd p;

  static NomaPower zeros(const ChannelState& st) {
    return {Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(st.num_users()),
                                  static_cast<Eigen::Index>(st.num_subcarriers()))};
  }
};

/// Served users of one (BS, subcarrier), strongest channel first.
using DecodeOrder = std::vector<std::size_t>;

inline DecodeOrder decode_order(const ChannelState& st, std::size_t f, std::size_t n) {
  if (f >= st.num_bs() || n >= st.num_subcarriers()) throw std::out_of_range("decode_order: index out of range");
  DecodeOrder order = st.users_of(f);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return st.gain(f, a, n) > st.gain(f, b, n); });
  return order;
}

/// Decode orders for every (BS, subcarrier) plus each user's position.
class DecodeOrders {
public:
  explicit DecodeOrders(const ChannelState& st)
      : N_(st.num_subcarriers()), orders_(st.num_bs() * N_), position_(st.num_users() * N_) {
    for (std::size_t f = 0; f < st.num_bs(); ++f)
      for (std::size_t n = 0; n < N_; ++n) {
        auto& o = orders_[f * N_ + n];
        o = decode_order(st, f, n);
        for (std::size_t k = 0; k < o.size(); ++k) position_[o[k] * N_ + n] = k;
      }
  }
  const DecodeOrder& order(std::size_t f, std::size_t n) const { return orders_[f * N_ + n]; }
  std::size_t position(std::size_t m, std::size_t n) const { return position_[m * N_ + n]; }

private:
  std::size_t N_;
  std::vector<DecodeOrder> orders_;
  std::vector<std::size_t> position_;
};

namespace detail {

inline void check_shape(const ChannelState& st, const Eigen::MatrixXd& a, const char* what) {
  if (a.rows() != static_cast<Eigen::Index>(st.num_users()) ||
      a.cols() != static_cast<Eigen::Index>(st.num_subcarriers()))
    throw std::invalid_argument(std::string(what) + ": expected users x subcarriers matrix");
}

// Signal rho g p and denominator I + sigma^2 of every (user, subcarrier).
struct Links {
  Eigen::MatrixXd signal;
  Eigen::MatrixXd denom;
};

inline Links evaluate_links(const ChannelState& st, const DecodeOrders& orders, const Eigen::MatrixXd& rho,
                            const Eigen::MatrixXd& p) {
  const auto M = static_cast<Eigen::Index>(st.num_users());
  const std::size_t N = st.num_subcarriers(), F = st.num_bs();
  Links out{Eigen::MatrixXd::Zero(M, static_cast<Eigen::Index>(N)), Eigen::MatrixXd::Zero(M, static_cast<Eigen::Index>(N))};
  std::vector<double> tx(F);
  for (std::size_t n = 0; n < N; ++n) {
    const auto nn = static_cast<Eigen::Index>(n);
    std::fill(tx.begin(), tx.end(), 0.0);
    for (Eigen::Index m = 0; m < M; ++m) tx[st.serving_bs(static_cast<std::size_t>(m))] += rho(m, nn) * p(m, nn);
    for (std::size_t f = 0; f < F; ++f) {
      double earlier = 0.0;  // rho p of stronger users already in the order
      for (std::size_t m : orders.order(f, n)) {
        const auto mm = static_cast<Eigen::Index>(m);
        const double g = st.gain(f, m, n);
        double cross = 0.0;
        for (std::size_t f2 = 0; f2 < F; ++f2)
          if (f2 != f) cross += st.gain(f2, m, n) * tx[f2];
        out.signal(mm, nn) = rho(mm, nn) * g * p(mm, nn);
        out.denom(mm, nn) = g * earlier + cross + st.noise(m, n);
        earlier += rho(mm, nn) * p(mm, nn);
      }
    }
  }
  return out;
}

}  // namespace detail

/// SINR of every (user, subcarrier). A user sees the stronger users earlier in
/// its decode order plus all other cells on that subcarrier as interference.
inline Eigen::MatrixXd noma_sinr_matrix(const ChannelState& st, const DecodeOrders& orders, const NomaAssignment& rho,
                                        const NomaPower& p) {
  detail::check_shape(st, rho.rho, "noma_sinr");
  detail::check_shape(st, p.p, "noma_sinr");
  const auto links = detail::evaluate_links(st, orders, rho.rho, p.p);
  return links.signal.cwiseQuotient(links.denom);
}

inline double noma_sinr(const ChannelState& st, const NomaAssignment& rho, const NomaPower& p, std::size_t f,
                        std::size_t m, std::size_t n) {
  if (m >= st.num_users() || st.serving_bs(m) != f) throw std::invalid_argument("noma_sinr: user not served by BS");
  return noma_sinr_matrix(st, DecodeOrders(st), rho, p)(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
}

/// Sum over all (BS, user, subcarrier) of log(1 + SINR), in nats.
inline double noma_sum_rate(const ChannelState& st, const NomaAssignment& rho, const NomaPower& p) {
  return sum_log1p(noma_sinr_matrix(st, DecodeOrders(st), rho, p));
}

/// Number of (BS, subcarrier) pairs whose active users violate the
/// ascending-power-along-decode-order premise. Reported, not enforced.
inline std::size_t power_order_violations(const ChannelState& st, const NomaAssignment& rho, const NomaPower& p) {
  const DecodeOrders orders(st);
  std::size_t count = 0;
  for (std::size_t f = 0; f < st.num_bs(); ++f)
    for (std::size_t n = 0; n < st.num_subcarriers(); ++n) {
      double prev = -1.0;
      for (std::size_t m : orders.order(f, n)) {
        const auto mm = static_cast<Eigen::Index>(m), nn = static_cast<Eigen::Index>(n);
        if (rho.rho(mm, nn) <= 0.0) continue;
        if (p.p(mm, nn) < prev) {
          ++count;
          break;
        }
        prev = p.p(mm, nn);
      }
    }
  return count;
}

/// Power-allocation view of a fixed binary assignment (entries > 0 are on).
class PowerModel {
public:
  PowerModel(const ChannelState& st, const Eigen::MatrixXd& rho) : st_(st), orders_(st), rho_(rho) {
    detail::check_shape(st, rho, "PowerModel");
  }

  const ChannelState& channels() const { return st_; }
  const DecodeOrders& orders() const { return orders_; }
  Eigen::Index rows() const { return rho_.rows(); }
  Eigen::Index cols() const { return rho_.cols(); }
  bool active(Eigen::Index i, Eigen::Index j) const { return rho_(i, j) > 0.0; }
  std::size_t owner(Eigen::Index i) const { return st_.serving_bs(static_cast<std::size_t>(i)); }

  Eigen::MatrixXd sinr(const Eigen::MatrixXd& p) const {
    const auto links = detail::evaluate_links(st_, orders_, rho_, p);
    return links.signal.cwiseQuotient(links.denom);
  }

  /// Stationarity of the convexified Lagrangian, solved for p(m, n):
  ///   p = alpha / (lambda_f + sum_{weaker i} alpha_i g_i / D_i
  ///                         + sum_{j in other cells} alpha_j g(f -> j) / D_j)
  /// where D is the interference-plus-noise denominator at the current p
  /// (gamma_i / p_i = g_i / D_i). Inactive entries get 0; active entries are
  /// clamped to [p_floor, p_max_f].
  Eigen::MatrixXd closed_form(const Eigen::MatrixXd& p, const Eigen::MatrixXd& alpha, const convex::DualState& duals,
                              double p_floor) const {
    const std::size_t N = st_.num_subcarriers(), F = st_.num_bs(), M = st_.num_users();
    const auto links = detail::evaluate_links(st_, orders_, rho_, p);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows(), cols());
    std::vector<double> price(F);
    for (std::size_t n = 0; n < N; ++n) {
      const auto nn = static_cast<Eigen::Index>(n);
      // Cross-cell price paid by BS f for hurting active users of other cells.
      std::fill(price.begin(), price.end(), 0.0);
      for (std::size_t j = 0; j < M; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        if (!active(jj, nn)) continue;
        const double w = alpha(jj, nn) / links.denom(jj, nn);
        for (std::size_t f = 0; f < F; ++f)
          if (f != st_.serving_bs(j)) price[f] += w * st_.gain(f, j, n);
      }
      for (std::size_t f = 0; f < F; ++f) {
        const auto& order = orders_.order(f, n);
        double later = 0.0;  // suffix over weaker users of alpha_i g_i / D_i
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
          const auto mm = static_cast<Eigen::Index>(*it);
          if (active(mm, nn)) {
            const double den = duals.lambda[f] + later + price[f];
            const double cap = st_.p_max(f);
            const double v = den > 0.0 ? alpha(mm, nn) / den : cap;
            out(mm, nn) = std::clamp(v, p_floor, cap);
            later += alpha(mm, nn) * st_.gain(f, *it, n) / links.denom(mm, nn);
          }
        }
      }
    }
    return out;
  }

  /// Gauss-Seidel pass: each active entry solves its own stationarity
  /// condition exactly, with the denominators of the users it interferes with
  /// written as affine functions of its power.
  void coordinate_sweep(Eigen::MatrixXd& p, const Eigen::MatrixXd& alpha, const convex::DualState& duals,
                        double p_floor) const {
    const std::size_t N = st_.num_subcarriers(), F = st_.num_bs(), M = st_.num_users();
    std::vector<double> denom(M);
    std::vector<std::size_t> victim_ids;
    std::vector<Victim> victims;
    for (std::size_t n = 0; n < N; ++n) {
      const auto nn = static_cast<Eigen::Index>(n);
      for (std::size_t m = 0; m < M; ++m)
        if (!active(static_cast<Eigen::Index>(m), nn)) p(static_cast<Eigen::Index>(m), nn) = 0.0;
      subcarrier_denoms(p, n, denom);
      for (std::size_t f = 0; f < F; ++f) {
        const auto& order = orders_.order(f, n);
        for (std::size_t k = 0; k < order.size(); ++k) {
          const std::size_t m = order[k];
          const auto mm = static_cast<Eigen::Index>(m);
          if (!active(mm, nn)) continue;
          const double old = p(mm, nn);
          victim_ids.clear();
          victims.clear();
          auto add = [&](std::size_t j) {
            const auto jj = static_cast<Eigen::Index>(j);
            if (!active(jj, nn)) return;
            const double c = rho_(mm, nn) * st_.gain(f, j, n);
            victim_ids.push_back(j);
            victims.push_back({alpha(jj, nn), c, std::max(denom[j] - c * old, 0.0)});
          };
          for (std::size_t k2 = k + 1; k2 < order.size(); ++k2) add(order[k2]);
          for (std::size_t j = 0; j < M; ++j)
            if (st_.serving_bs(j) != f) add(j);
          const double v = solve_stationary_power(alpha(mm, nn), duals.lambda[f], victims, old > 0.0 ? old : p_floor,
                                                  p_floor, st_.p_max(f));
          p(mm, nn) = v;
          for (std::size_t q = 0; q < victims.size(); ++q) denom[victim_ids[q]] = victims[q].coupling * v + victims[q].rest;
        }
      }
    }
  }

private:
  // Interference-plus-noise denominators of every user on subcarrier n.
  void subcarrier_denoms(const Eigen::MatrixXd& p, std::size_t n, std::vector<double>& denom) const {
    const std::size_t F = st_.num_bs();
    const auto nn = static_cast<Eigen::Index>(n);
    std::vector<double> tx(F, 0.0);
    for (std::size_t m = 0; m < st_.num_users(); ++m)
      tx[st_.serving_bs(m)] += rho_(static_cast<Eigen::Index>(m), nn) * p(static_cast<Eigen::Index>(m), nn);
    for (std::size_t f = 0; f < F; ++f) {
      double earlier = 0.0;
      for (std::size_t m : orders_.order(f, n)) {
        const auto mm = static_cast<Eigen::Index>(m);
        double cross = 0.0;
        for (std::size_t f2 = 0; f2 < F; ++f2)
          if (f2 != f) cross += st_.gain(f2, m, n) * tx[f2];
        denom[m] = st_.gain(f, m, n) * earlier + cross + st_.noise(m, n);
        earlier += rho_(mm, nn) * p(mm, nn);
      }
    }
  }

  const ChannelState& st_;
  DecodeOrders orders_;
  Eigen::MatrixXd rho_;
};

inline NomaPower noma_power_closed_form(const ChannelState& st, const NomaAssignment& rho, const NomaPower& p_current,
                                        const CoeffGrid& scale, const convex::DualState& duals, double p_floor = 1e-12) {
  if (duals.lambda.size() != st.num_bs()) throw std::invalid_argument("noma_power_closed_form: one multiplier per BS");
  for (double l : duals.lambda)
    if (l < 0.0) throw std::invalid_argument("noma_power_closed_form: multipliers must be nonnegative");
  PowerModel model(st, rho.rho);
  for (Eigen::Index i = 0; i < model.rows(); ++i)
    for (Eigen::Index j = 0; j < model.cols(); ++j)
      if (model.active(i, j) && !(p_current.p(i, j) > 0.0))
        throw std::invalid_argument("noma_power_closed_form: current power must be positive on assigned entries");
  return {model.closed_form(p_current.p, scale.alpha, duals, p_floor)};
}

struct NomaPowerResult {
  NomaPower power;
  double sum_rate = 0.0;
  PowerAllocation detail;
};

/// SCALE outer loop around the dual closed-form inner loop for a fixed binary
/// assignment. Returns the best feasible iterate by true sum-rate.
inline NomaPowerResult allocate_power(const ChannelState& st, const NomaAssignment& rho, const NomaPower& p_init,
                                      const SolverConfig& cfg) {
  detail::check_shape(st, p_init.p, "allocate_power");
  PowerModel model(st, rho.rho);
  auto alloc = scale_power_allocation(model, p_init.p, cfg);
  NomaPowerResult out;
  out.power.p = alloc.p;
  out.sum_rate = alloc.sum_rate;
  out.detail = std::move(alloc);
  return out;
}

/// Per (BS, subcarrier), keep the up-to-L_T users with the largest relaxed
/// value among those at or above `threshold`; ties go to the lower user index.
inline NomaAssignment round_assignment(const ChannelState& st, const NomaAssignment& relaxed, std::size_t max_users,
                                       double threshold = 0.1) {
  detail::check_shape(st, relaxed.rho, "round_assignment");
  NomaAssignment out = NomaAssignment::zeros(st, AssignmentMode::binary);
  for (std::size_t f = 0; f < st.num_bs(); ++f)
    for (std::size_t n = 0; n < st.num_subcarriers(); ++n) {
      const auto nn = static_cast<Eigen::Index>(n);
      std::vector<std::size_t> cand;
      for (std::size_t m : st.users_of(f))
        if (relaxed.rho(static_cast<Eigen::Index>(m), nn) >= threshold) cand.push_back(m);
      std::stable_sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) {
        return relaxed.rho(static_cast<Eigen::Index>(a), nn) > relaxed.rho(static_cast<Eigen::Index>(b), nn);
      });
      for (std::size_t k = 0; k < cand.size() && k < max_users; ++k) out.rho(static_cast<Eigen::Index>(cand[k]), nn) = 1.0;
    }
  return out;
}

/// Relaxed sum-rate with candidate powers: the quantity the subcarrier
/// step maximizes.
inline double relaxed_objective(const ChannelState& st, const DecodeOrders& orders, const Eigen::MatrixXd& rho,
                                const Eigen::MatrixXd& p_candidate) {
  const auto links = detail::evaluate_links(st, orders, rho, p_candidate);
  return sum_log1p(links.signal.cwiseQuotient(links.denom));
}

/// Geometric program of the subcarrier step, condensed around `anchor`:
///   minimize prod_{m,n} D_{m,n}(rho) / X_lower_{m,n}(rho)
/// with X = D + rho_m g p_m condensed to a monomial by the AGMA bound,
/// subject to the per-BS budget, the L_T cap, and rho in [rho_floor, 1].
inline convex::GpProblem build_subcarrier_gp(const ChannelState& st, const DecodeOrders& orders,
                                             const Eigen::MatrixXd& p_candidate, const Eigen::MatrixXd& anchor,
                                             const SolverConfig& cfg) {
  using convex::Monomial;
  using convex::Posynomial;
  const std::size_t M = st.num_users(), N = st.num_subcarriers(), F = st.num_bs();
  auto var = [N](std::size_t m, std::size_t n) { return m * N + n; };

  convex::GpProblem gp;
  gp.num_vars = M * N;
  gp.lower.assign(gp.num_vars, cfg.rho_floor);
  gp.upper.assign(gp.num_vars, 1.0);

  std::vector<double> x(M * N);
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t n = 0; n < N; ++n) x[var(m, n)] = anchor(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));

  auto pc = [&](std::size_t m, std::size_t n) {
    return p_candidate(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  };

  for (std::size_t f = 0; f < F; ++f)
    for (std::size_t n = 0; n < N; ++n) {
      const auto& order = orders.order(f, n);
      for (std::size_t k = 0; k < order.size(); ++k) {
        const std::size_t m = order[k];
        const double g = st.gain(f, m, n);
        if (!(g * pc(m, n) > 0.0)) continue;
        Posynomial denom;
        denom.terms.push_back(Monomial{st.noise(m, n), {}});
        for (std::size_t i = 0; i < k; ++i) {
          const double c = g * pc(order[i], n);
          if (c > 0.0) denom.terms.push_back(Monomial{c, {{var(order[i], n), 1.0}}});
        }
        for (std::size_t j = 0; j < M; ++j) {
          const std::size_t f2 = st.serving_bs(j);
          if (f2 == f) continue;
          const double c = st.gain(f2, m, n) * pc(j, n);
          if (c > 0.0) denom.terms.push_back(Monomial{c, {{var(j, n), 1.0}}});
        }
        Posynomial total = denom;
        total.terms.push_back(Monomial{g * pc(m, n), {{var(m, n), 1.0}}});
        gp.objective.push_back(convex::divide(denom, convex::condense(total, x)));
      }
    }
  if (gp.objective.empty()) gp.objective.push_back(Posynomial{{Monomial{1.0, {}}}});

  const double cap = static_cast<double>(cfg.max_users_per_subcarrier);
  for (std::size_t f = 0; f < F; ++f) {
    const auto& users = st.users_of(f);
    if (users.size() > cfg.max_users_per_subcarrier)
      for (std::size_t n = 0; n < N; ++n) {
        Posynomial c;
        for (std::size_t m : users) c.terms.push_back(Monomial{1.0 / cap, {{var(m, n), 1.0}}});
        gp.constraints.push_back(std::move(c));
      }
    Posynomial budget;
    for (std::size_t m : users)
      for (std::size_t n = 0; n < N; ++n)
        if (pc(m, n) > 0.0) budget.terms.push_back(Monomial{pc(m, n) / st.p_max(f), {{var(m, n), 1.0}}});
    if (!budget.terms.empty()) gp.constraints.push_back(std::move(budget));
  }
  return gp;
}

// The previous optimum sits on the constraint boundary; the GP starts from a
// scaled-down copy, which every increasing posynomial constraint allows.
inline constexpr double kStartShrink = 0.9;

struct SubcarrierResult {
  NomaAssignment relaxed;
  std::vector<double> objective_history;  // relaxed objective after each accepted round
  std::size_t gp_iterations = 0;
};

/// Relaxed subcarrier allocation by successive AGMA condensation: each round
/// solves the condensed GP and is accepted only if the relaxed sum-rate rises.
inline SubcarrierResult allocate_subcarriers(const ChannelState& st, const NomaPower& p_candidate,
                                             const NomaAssignment& rho_init, const SolverConfig& cfg) {
  cfg.validate();
  detail::check_shape(st, p_candidate.p, "allocate_subcarriers");
  detail::check_shape(st, rho_init.rho, "allocate_subcarriers");
  for (Eigen::Index k = 0; k < rho_init.rho.size(); ++k) {
    const double v = rho_init.rho.data()[k];
    if (!(v > 0.0 && v <= 1.0)) throw std::invalid_argument("allocate_subcarriers: anchor must lie in (0, 1]");
  }
  const DecodeOrders orders(st);
  const std::size_t M = st.num_users(), N = st.num_subcarriers();

  SubcarrierResult out;
  Eigen::MatrixXd anchor = rho_init.rho.cwiseMax(cfg.rho_floor).cwiseMin(1.0);
  double best = relaxed_objective(st, orders, anchor, p_candidate.p);
  out.objective_history.push_back(best);
  for (std::size_t it = 0; it < cfg.condense_iters; ++it) {
    const auto gp = build_subcarrier_gp(st, orders, p_candidate.p, anchor, cfg);
    std::vector<double> start(M * N);
    for (std::size_t m = 0; m < M; ++m)
      for (std::size_t n = 0; n < N; ++n)
        start[m * N + n] = std::max(kStartShrink * anchor(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)),
                                    cfg.rho_floor);
    const auto res = convex::solve_gp(gp, start, cfg.gp);
    out.gp_iterations += res.iterations;
    if (!res.ok())
      throw std::runtime_error("allocate_subcarriers: condensed GP infeasible (round " + std::to_string(it) + ", " +
                               std::to_string(st.num_bs()) + " BSs, " + std::to_string(M) + " users): " + res.message);
    Eigen::MatrixXd cand(anchor.rows(), anchor.cols());
    for (std::size_t m = 0; m < M; ++m)
      for (std::size_t n = 0; n < N; ++n)
        cand(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) = res.x[m * N + n];
    const double val = relaxed_objective(st, orders, cand, p_candidate.p);
    if (!(val > best)) break;
    const double gain = val - best;
    anchor = std::move(cand);
    best = val;
    out.objective_history.push_back(best);
    if (gain <= cfg.condense_tol * std::max(1.0, std::abs(best))) break;
  }
  out.relaxed = {anchor, AssignmentMode::relaxed};
  return out;
}

struct NomaSolution {
  NomaAssignment assignment;
  NomaPower power;
  double sum_rate = 0.0;
  std::size_t iterations = 0;
  bool converged = false;             // outer power-change criterion met
  bool cycled = false;                // stopped on a repeated assignment
  bool stalled = false;               // stopped after stall_iters iterations without a new best
  std::vector<double> best_history;   // best-so-far sum-rate after each outer iteration
  std::vector<PowerAllocation> power_solves;
  std::size_t order_violations = 0;
};

namespace detail {

// Powers offered to the subcarrier step: the allocated power where assigned
// and alive, otherwise the mean allocated power of the cell.
inline Eigen::MatrixXd candidate_powers(const ChannelState& st, const Eigen::MatrixXd& rho, const Eigen::MatrixXd& p,
                                        const SolverConfig& cfg) {
  Eigen::MatrixXd out = p;
  for (std::size_t f = 0; f < st.num_bs(); ++f) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t m : st.users_of(f))
      for (Eigen::Index n = 0; n < rho.cols(); ++n)
        if (rho(static_cast<Eigen::Index>(m), n) > 0.0) {
          sum += p(static_cast<Eigen::Index>(m), n);
          ++count;
        }
    const double slots = static_cast<double>(std::min(st.users_of(f).size(), cfg.max_users_per_subcarrier) *
                                             st.num_subcarriers());
    const double mean = count > 0 && sum > 0.0 ? sum / static_cast<double>(count) : st.p_max(f) / slots;
    for (std::size_t m : st.users_of(f))
      for (Eigen::Index n = 0; n < rho.cols(); ++n) {
        auto& v = out(static_cast<Eigen::Index>(m), n);
        if (rho(static_cast<Eigen::Index>(m), n) <= 0.0 || v < 1e-3 * mean) v = mean;
      }
  }
  return out;
}

}  // namespace detail

/// Alternating optimization: SCALE power allocation for the current binary
/// assignment, then AGMA/GP subcarrier allocation for those powers, until the
/// power matrix stops moving. The best feasible pair seen is returned.
inline NomaSolution solve_noma(const ChannelState& st, const SolverConfig& cfg) {
  cfg.validate();
  const auto M = static_cast<Eigen::Index>(st.num_users());
  const auto N = static_cast<Eigen::Index>(st.num_subcarriers());

  NomaAssignment relaxed = NomaAssignment::zeros(st, AssignmentMode::relaxed);
  for (std::size_t f = 0; f < st.num_bs(); ++f) {
    const double share = std::min(1.0, static_cast<double>(cfg.max_users_per_subcarrier) /
                                           static_cast<double>(st.users_of(f).size()));
    for (std::size_t m : st.users_of(f)) relaxed.rho.row(static_cast<Eigen::Index>(m)).setConstant(share);
  }
  NomaAssignment rho = round_assignment(st, relaxed, cfg.max_users_per_subcarrier, cfg.round_threshold);

  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(M, N);
  for (std::size_t f = 0; f < st.num_bs(); ++f) {
    double count = 0.0;
    for (std::size_t m : st.users_of(f)) count += rho.rho.row(static_cast<Eigen::Index>(m)).sum();
    for (std::size_t m : st.users_of(f))
      for (Eigen::Index n = 0; n < N; ++n)
        if (rho.rho(static_cast<Eigen::Index>(m), n) > 0.0) p(static_cast<Eigen::Index>(m), n) = st.p_max(f) / count;
  }

  NomaSolution best;
  best.assignment = rho;
  best.power = {p};
  best.sum_rate = noma_sum_rate(st, rho, best.power);
  const double tol_w = cfg.outer_tol_w(st);
  Eigen::MatrixXd prev_power;
  Eigen::MatrixXd prev_rho = rho.rho;
  std::vector<Eigen::MatrixXd> visited;
  std::size_t no_gain = 0;
  const double interior_hi = 1.0 - 1e-3;

  for (std::size_t k = 0; k < cfg.outer_iters; ++k) {
    auto pr = allocate_power(st, rho, {p}, cfg);
    best.iterations = k + 1;
    const bool improved = pr.sum_rate > best.sum_rate;
    if (improved) {
      best.sum_rate = pr.sum_rate;
      best.assignment = rho;
      best.power = pr.power;
    }
    best.best_history.push_back(best.sum_rate);
    best.power_solves.push_back(pr.detail);
    if (prev_power.size() > 0 && (pr.power.p - prev_power).norm() <= tol_w) {
      best.converged = true;
      break;
    }
    no_gain = improved || k == 0 ? 0 : no_gain + 1;
    if (cfg.stall_iters > 0 && no_gain >= cfg.stall_iters) {
      best.stalled = true;
      break;
    }
    prev_power = pr.power.p;
    if (k + 1 == cfg.outer_iters) break;

    const Eigen::MatrixXd cand = detail::candidate_powers(st, rho.rho, pr.power.p, cfg);
    NomaAssignment anchor{relaxed.rho.cwiseMax(2.0 * cfg.rho_floor).cwiseMin(interior_hi), AssignmentMode::relaxed};
    auto sub = allocate_subcarriers(st, {cand}, anchor, cfg);
    relaxed = sub.relaxed;
    rho = round_assignment(st, relaxed, cfg.max_users_per_subcarrier, cfg.round_threshold);
    // An unchanged assignment is a fixed point of the alternation; one seen
    // earlier means it is cycling. Either way the best pair seen covers it.
    visited.push_back(prev_rho);
    prev_rho = rho.rho;
    if (rho.rho == visited.back()) {
      best.converged = true;
      break;
    }
    if (std::any_of(visited.begin(), visited.end(), [&](const Eigen::MatrixXd& v) { return v == rho.rho; })) {
      best.cycled = true;
      break;
    }
    p = cand.cwiseProduct(rho.rho);
  }
  best.order_violations = power_order_violations(st, best.assignment, best.power);
  return best;
}

}  // namespace nomascma::noma

#endif  // NOMASCMA_NOMA_HPP
