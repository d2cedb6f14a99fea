#ifndef NOMASCMA_SCMA_HPP
#define NOMASCMA_SCMA_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nomascma/checked_math.hpp"
#include "nomascma/convex/dual.hpp"
#include "nomascma/convex/gp.hpp"
#include "nomascma/hetnet.hpp"
#include "nomascma/scale_power.hpp"
#include "nomascma/solver_config.hpp"

namespace nomascma::scma {

/// Size-U subcarrier subsets with power-split weights eta (summing to 1 over
/// the subset).
class CodebookSet {
public:
  CodebookSet() = default;

  CodebookSet(std::size_t num_subcarriers, std::vector<std::vector<std::size_t>> codebooks,
              std::vector<std::vector<double>> weights)
      : N_(num_subcarriers), codebooks_(std::move(codebooks)), weights_(std::move(weights)) {
    if (codebooks_.empty()) throw std::invalid_argument("CodebookSet: no codebooks");
    if (weights_.size() != codebooks_.size()) throw std::invalid_argument("CodebookSet: one weight row per codebook");
    U_ = codebooks_.front().size();
    for (std::size_t c = 0; c < codebooks_.size(); ++c) {
      const auto& cb = codebooks_[c];
      if (cb.size() != U_ || U_ == 0) throw std::invalid_argument("CodebookSet: codebooks must all have U >= 1 subcarriers");
      if (weights_[c].size() != U_) throw std::invalid_argument("CodebookSet: weight row size must equal U");
      double sum = 0.0;
      for (std::size_t k = 0; k < U_; ++k) {
        if (cb[k] >= N_) throw std::invalid_argument("CodebookSet: subcarrier out of range");
        if (k > 0 && cb[k] <= cb[k - 1]) throw std::invalid_argument("CodebookSet: subcarriers must be strictly increasing");
        if (!(weights_[c][k] >= 0.0 && weights_[c][k] <= 1.0)) throw std::invalid_argument("CodebookSet: weights must lie in [0, 1]");
        sum += weights_[c][k];
      }
      if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("CodebookSet: weights of a codebook must sum to 1");
    }
  }

  std::size_t size() const { return codebooks_.size(); }
  std::size_t num_subcarriers() const { return N_; }
  std::size_t codebook_size() const { return U_; }
  const std::vector<std::size_t>& subcarriers(std::size_t c) const { return codebooks_[c]; }
  const std::vector<double>& weights(std::size_t c) const { return weights_[c]; }

  bool incidence(std::size_t n, std::size_t c) const {
    const auto& cb = codebooks_[c];
    return std::binary_search(cb.begin(), cb.end(), n);
  }
  /// eta of subcarrier n in codebook c; 0 off the codebook.
  double weight(std::size_t n, std::size_t c) const {
    const auto& cb = codebooks_[c];
    const auto it = std::lower_bound(cb.begin(), cb.end(), n);
    return it != cb.end() && *it == n ? weights_[c][static_cast<std::size_t>(it - cb.begin())] : 0.0;
  }

private:
  std::size_t N_ = 0;
  std::size_t U_ = 0;
  std::vector<std::vector<std::size_t>> codebooks_;
  std::vector<std::vector<double>> weights_;
};

/// All C(N, U) size-U subsets in lexicographic order with uniform eta = 1/U.
inline CodebookSet enumerate_codebooks(std::size_t N, std::size_t U) {
  if (U < 1 || U > N) throw std::invalid_argument("enumerate_codebooks: need 1 <= U <= N");
  if (binomial(N, U) > 100000) throw std::invalid_argument("enumerate_codebooks: too many codebooks");
  std::vector<std::vector<std::size_t>> books;
  std::vector<std::size_t> idx(U);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    books.push_back(idx);
    std::size_t k = U;
    while (k > 0 && idx[k - 1] == N - U + (k - 1)) --k;
    if (k == 0) break;
    ++idx[k - 1];
    for (std::size_t j = k; j < U; ++j) idx[j] = idx[j - 1] + 1;
  }
  std::vector<std::vector<double>> w(books.size(), std::vector<double>(U, 1.0 / static_cast<double>(U)));
  return CodebookSet(N, std::move(books), std::move(w));
}

enum class AssignmentMode { binary, relaxed };

/// Codebook map q(m, c) of user m (served by its own BS) on codebook c.
struct ScmaAssignment {
  Eigen::MatrixXd q;
  AssignmentMode mode = AssignmentMode::binary;

  static ScmaAssignment zeros(const ChannelState& st, const CodebookSet& cbs, AssignmentMode mode) {
    return {Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(st.num_users()), static_cast<Eigen::Index>(cbs.size())),
            mode};
  }
};

/// Transmit power p(m, c) from the serving BS of m on codebook c, in watts.
struct ScmaPower {
  Eigen::MatrixXd p;

  static ScmaPower zeros(const ChannelState& st, const CodebookSet& cbs) {
    return {Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(st.num_users()), static_cast<Eigen::Index>(cbs.size()))};
  }
};

/// Which subcarriers carry cross-cell interference into a codebook.
enum class Interference {
  restricted,  // only subcarriers shared by both codebooks, weighted by the interferer's eta
  literal,     // every subcarrier, unweighted
};

/// Per-scenario link constants: codebook signal gains, codebook noise and
/// cross-cell couplings.
class Geometry {
public:
  Geometry(const ChannelState& st, const CodebookSet& cbs, Interference mode = Interference::restricted)
      : st_(st), cbs_(cbs), M_(st.num_users()), C_(cbs.size()), F_(st.num_bs()) {
    if (cbs.num_subcarriers() != st.num_subcarriers())
      throw std::invalid_argument("scma: codebook set and channel state disagree on N");
    signal_.assign(M_ * C_, 0.0);
    noise_.assign(M_ * C_, 0.0);
    for (std::size_t m = 0; m < M_; ++m)
      for (std::size_t c = 0; c < C_; ++c) {
        const auto& sc = cbs.subcarriers(c);
        const auto& w = cbs.weights(c);
        for (std::size_t k = 0; k < sc.size(); ++k) {
          signal_[m * C_ + c] += w[k] * st.own_gain(m, sc[k]);
          noise_[m * C_ + c] += w[k] * st.noise(m, sc[k]);
        }
      }
    cross_.assign(F_ * M_ * C_ * C_, 0.0);
    for (std::size_t f = 0; f < F_; ++f)
      for (std::size_t m = 0; m < M_; ++m) {
        if (st.serving_bs(m) == f) continue;
        if (mode == Interference::literal) {
          double all = 0.0;
          for (std::size_t n = 0; n < st.num_subcarriers(); ++n) all += st.gain(f, m, n);
          std::fill_n(cross_.begin() + static_cast<std::ptrdiff_t>((f * M_ + m) * C_ * C_), C_ * C_, all);
          continue;
        }
        for (std::size_t c = 0; c < C_; ++c)
          for (std::size_t c2 = 0; c2 < C_; ++c2) {
            double s = 0.0;
            for (std::size_t n : cbs.subcarriers(c)) s += cbs.weight(n, c2) * st.gain(f, m, n);
            cross_[((f * M_ + m) * C_ + c) * C_ + c2] = s;
          }
      }
  }

  const ChannelState& channels() const { return st_; }
  const CodebookSet& codebooks() const { return cbs_; }
  std::size_t users() const { return M_; }
  std::size_t size() const { return C_; }

  /// sum_{n in c} eta g(serving BS -> m, n)
  double signal(std::size_t m, std::size_t c) const { return signal_[m * C_ + c]; }
  /// sum_{n in c} eta sigma^2(m, n)
  double noise(std::size_t m, std::size_t c) const { return noise_[m * C_ + c]; }
  /// Gain from BS f transmitting on codebook c2 into user m on codebook c.
  double cross(std::size_t f, std::size_t m, std::size_t c, std::size_t c2) const {
    return cross_[((f * M_ + m) * C_ + c) * C_ + c2];
  }

  /// Interference-plus-noise denominator of every (user, codebook) for
  /// relaxed or binary q.
  Eigen::MatrixXd denominators(const Eigen::MatrixXd& q, const Eigen::MatrixXd& p) const {
    std::vector<double> tx;  // q p per (user, codebook), skipping zeros
    std::vector<std::size_t> who;
    for (std::size_t j = 0; j < M_; ++j)
      for (std::size_t c2 = 0; c2 < C_; ++c2) {
        const double v = q(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c2)) *
                         p(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c2));
        if (v > 0.0) {
          tx.push_back(v);
          who.push_back(j * C_ + c2);
        }
      }
    Eigen::MatrixXd d(static_cast<Eigen::Index>(M_), static_cast<Eigen::Index>(C_));
    for (std::size_t m = 0; m < M_; ++m)
      for (std::size_t c = 0; c < C_; ++c) {
        double s = noise(m, c);
        for (std::size_t k = 0; k < tx.size(); ++k) {
          const std::size_t j = who[k] / C_, c2 = who[k] % C_;
          const std::size_t f = st_.serving_bs(j);
          if (f != st_.serving_bs(m)) s += tx[k] * cross(f, m, c, c2);
        }
        d(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(c)) = s;
      }
    return d;
  }

  Eigen::MatrixXd sinr(const Eigen::MatrixXd& q, const Eigen::MatrixXd& p) const {
    const Eigen::MatrixXd d = denominators(q, p);
    Eigen::MatrixXd g(d.rows(), d.cols());
    for (Eigen::Index m = 0; m < d.rows(); ++m)
      for (Eigen::Index c = 0; c < d.cols(); ++c)
        g(m, c) = q(m, c) * p(m, c) * signal(static_cast<std::size_t>(m), static_cast<std::size_t>(c)) / d(m, c);
    return g;
  }

private:
  const ChannelState& st_;
  const CodebookSet& cbs_;
  std::size_t M_, C_, F_;
  std::vector<double> signal_, noise_, cross_;
};

namespace detail {

inline void check_shape(const Geometry& geo, const Eigen::MatrixXd& a, const char* what) {
  if (a.rows() != static_cast<Eigen::Index>(geo.users()) || a.cols() != static_cast<Eigen::Index>(geo.size()))
    throw std::invalid_argument(std::string(what) + ": expected users x codebooks matrix");
}

inline Interference interference_of(const SolverConfig& cfg) {
  return cfg.literal_scma_interference ? Interference::literal : Interference::restricted;
}

}  // namespace detail

/// SINR of user m (served by f) on codebook c; 0 when q(m, c) = 0.
inline double scma_sinr(const ChannelState& st, const CodebookSet& cbs, const ScmaAssignment& q, const ScmaPower& p,
                        std::size_t f, std::size_t m, std::size_t c, Interference mode = Interference::restricted) {
  if (m >= st.num_users() || st.serving_bs(m) != f) throw std::invalid_argument("scma_sinr: user not served by BS");
  if (c >= cbs.size()) throw std::out_of_range("scma_sinr: codebook out of range");
  const Geometry geo(st, cbs, mode);
  detail::check_shape(geo, q.q, "scma_sinr");
  detail::check_shape(geo, p.p, "scma_sinr");
  return geo.sinr(q.q, p.p)(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(c));
}

/// Sum over all (user, codebook) of log(1 + SINR), in nats.
inline double scma_sum_rate(const ChannelState& st, const CodebookSet& cbs, const ScmaAssignment& q,
                            const ScmaPower& p, Interference mode = Interference::restricted) {
  const Geometry geo(st, cbs, mode);
  detail::check_shape(geo, q.q, "scma_sum_rate");
  detail::check_shape(geo, p.p, "scma_sum_rate");
  return sum_log1p(geo.sinr(q.q, p.p));
}

/// Power-allocation view of a fixed binary codebook assignment.
class PowerModel {
public:
  PowerModel(const Geometry& geo, const Eigen::MatrixXd& q) : geo_(geo), q_(q) {
    detail::check_shape(geo, q, "PowerModel");
    for (std::size_t m = 0; m < geo.users(); ++m)
      for (std::size_t c = 0; c < geo.size(); ++c)
        if (q(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(c)) > 0.0) active_.push_back({m, c});
  }

  const ChannelState& channels() const { return geo_.channels(); }
  Eigen::Index rows() const { return q_.rows(); }
  Eigen::Index cols() const { return q_.cols(); }
  bool active(Eigen::Index i, Eigen::Index j) const { return q_(i, j) > 0.0; }
  std::size_t owner(Eigen::Index i) const { return geo_.channels().serving_bs(static_cast<std::size_t>(i)); }

  Eigen::MatrixXd sinr(const Eigen::MatrixXd& p) const { return geo_.sinr(q_, p); }

  /// Stationarity of the convexified Lagrangian, solved for p(m, c):
  ///   p = alpha / (lambda_f + sum_{(j, c') in other cells} alpha_j G(f -> j; c', c) / D_j)
  /// with D at the current p. Inactive entries get 0; active entries are
  /// clamped to [p_floor, p_max_f].
  Eigen::MatrixXd closed_form(const Eigen::MatrixXd& p, const Eigen::MatrixXd& alpha, const convex::DualState& duals,
                              double p_floor) const {
    const auto& st = geo_.channels();
    const Eigen::MatrixXd d = geo_.denominators(q_, p);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows(), cols());
    for (const auto& [m, c] : active_) {
      const std::size_t f = st.serving_bs(m);
      double den = duals.lambda[f];
      for (const auto& [j, c2] : active_) {
        if (st.serving_bs(j) == f) continue;
        const auto jj = static_cast<Eigen::Index>(j), cc = static_cast<Eigen::Index>(c2);
        den += alpha(jj, cc) * q_(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(c)) * geo_.cross(f, j, c2, c) /
               d(jj, cc);
      }
      const double cap = st.p_max(f);
      const auto mm = static_cast<Eigen::Index>(m), ci = static_cast<Eigen::Index>(c);
      out(mm, ci) = std::clamp(den > 0.0 ? alpha(mm, ci) / den : cap, p_floor, cap);
    }
    return out;
  }

  /// Gauss-Seidel pass solving each active entry's stationarity condition
  /// exactly in its own power.
  void coordinate_sweep(Eigen::MatrixXd& p, const Eigen::MatrixXd& alpha, const convex::DualState& duals,
                        double p_floor) const {
    const auto& st = geo_.channels();
    for (Eigen::Index k = 0; k < p.size(); ++k)
      if (q_.data()[k] <= 0.0) p.data()[k] = 0.0;
    const Eigen::MatrixXd dm = geo_.denominators(q_, p);
    std::vector<double> d(active_.size());
    for (std::size_t k = 0; k < active_.size(); ++k)
      d[k] = dm(static_cast<Eigen::Index>(active_[k].m), static_cast<Eigen::Index>(active_[k].c));
    std::vector<std::size_t> ids;
    std::vector<Victim> victims;
    for (const auto& [m, c] : active_) {
      const std::size_t f = st.serving_bs(m);
      const auto mm = static_cast<Eigen::Index>(m), ci = static_cast<Eigen::Index>(c);
      const double old = p(mm, ci);
      ids.clear();
      victims.clear();
      for (std::size_t k = 0; k < active_.size(); ++k) {
        const auto& v = active_[k];
        if (st.serving_bs(v.m) == f) continue;
        const double g = q_(mm, ci) * geo_.cross(f, v.m, v.c, c);
        if (!(g > 0.0)) continue;
        ids.push_back(k);
        victims.push_back({alpha(static_cast<Eigen::Index>(v.m), static_cast<Eigen::Index>(v.c)), g,
                           std::max(d[k] - g * old, 0.0)});
      }
      const double val = solve_stationary_power(alpha(mm, ci), duals.lambda[f], victims, old > 0.0 ? old : p_floor,
                                                p_floor, st.p_max(f));
      p(mm, ci) = val;
      for (std::size_t k = 0; k < ids.size(); ++k) d[ids[k]] = victims[k].coupling * val + victims[k].rest;
    }
  }

private:
  struct Entry {
    std::size_t m, c;
  };
  const Geometry& geo_;
  Eigen::MatrixXd q_;
  std::vector<Entry> active_;
};

inline ScmaPower scma_power_closed_form(const ChannelState& st, const CodebookSet& cbs, const ScmaAssignment& q,
                                        const ScmaPower& p_current, const CoeffGrid& scale,
                                        const convex::DualState& duals, double p_floor = 1e-12,
                                        Interference mode = Interference::restricted) {
  if (duals.lambda.size() != st.num_bs()) throw std::invalid_argument("scma_power_closed_form: one multiplier per BS");
  for (double l : duals.lambda)
    if (l < 0.0) throw std::invalid_argument("scma_power_closed_form: multipliers must be nonnegative");
  const Geometry geo(st, cbs, mode);
  detail::check_shape(geo, p_current.p, "scma_power_closed_form");
  PowerModel model(geo, q.q);
  for (Eigen::Index i = 0; i < model.rows(); ++i)
    for (Eigen::Index j = 0; j < model.cols(); ++j)
      if (model.active(i, j) && !(p_current.p(i, j) > 0.0))
        throw std::invalid_argument("scma_power_closed_form: current power must be positive on assigned entries");
  return {model.closed_form(p_current.p, scale.alpha, duals, p_floor)};
}

struct ScmaPowerResult {
  ScmaPower power;
  double sum_rate = 0.0;
  PowerAllocation detail;
};

inline ScmaPowerResult allocate_power_scma(const Geometry& geo, const ScmaAssignment& q, const ScmaPower& p_init,
                                           const SolverConfig& cfg) {
  detail::check_shape(geo, p_init.p, "allocate_power_scma");
  PowerModel model(geo, q.q);
  auto alloc = scale_power_allocation(model, p_init.p, cfg);
  ScmaPowerResult out;
  out.power.p = alloc.p;
  out.sum_rate = alloc.sum_rate;
  out.detail = std::move(alloc);
  return out;
}

/// SCALE outer loop around the dual inner loop for a fixed binary assignment.
inline ScmaPowerResult allocate_power_scma(const ChannelState& st, const CodebookSet& cbs, const ScmaAssignment& q,
                                           const ScmaPower& p_init, const SolverConfig& cfg) {
  const Geometry geo(st, cbs, detail::interference_of(cfg));
  return allocate_power_scma(geo, q, p_init, cfg);
}

/// Entries the codebook GP optimizes over: per (BS, codebook), the `per_codebook`
/// users with the strongest codebook gain (ties to the lower index); 0 keeps all.
inline Eigen::MatrixXd candidate_mask(const Geometry& geo, std::size_t per_codebook) {
  const auto& st = geo.channels();
  Eigen::MatrixXd mask = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(geo.users()), static_cast<Eigen::Index>(geo.size()));
  for (std::size_t f = 0; f < st.num_bs(); ++f)
    for (std::size_t c = 0; c < geo.size(); ++c) {
      std::vector<std::size_t> users = st.users_of(f);
      std::stable_sort(users.begin(), users.end(),
                       [&](std::size_t a, std::size_t b) { return geo.signal(a, c) > geo.signal(b, c); });
      const std::size_t keep = per_codebook == 0 ? users.size() : std::min(per_codebook, users.size());
      for (std::size_t k = 0; k < keep; ++k) mask(static_cast<Eigen::Index>(users[k]), static_cast<Eigen::Index>(c)) = 1.0;
    }
  return mask;
}

/// Greedy rounding: entries at or above `threshold` are visited by relaxed
/// value (then codebook gain, then index) and kept while every subcarrier of
/// the codebook still has reuse left in the user's cell and the optional
/// per-user cap allows it. A one-for-two exchange pass then fills capacity
/// the greedy order left unused.
inline ScmaAssignment round_codebooks(const Geometry& geo, const Eigen::MatrixXd& relaxed, std::size_t reuse_cap,
                                      double threshold = 0.1, std::size_t per_user_cap = 0) {
  detail::check_shape(geo, relaxed, "round_codebooks");
  const auto& st = geo.channels();
  const auto& cbs = geo.codebooks();
  const std::size_t M = geo.users(), C = geo.size(), N = st.num_subcarriers();
  std::vector<std::size_t> order;
  for (std::size_t k = 0; k < M * C; ++k)
    if (relaxed(static_cast<Eigen::Index>(k / C), static_cast<Eigen::Index>(k % C)) >= threshold) order.push_back(k);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double va = relaxed(static_cast<Eigen::Index>(a / C), static_cast<Eigen::Index>(a % C));
    const double vb = relaxed(static_cast<Eigen::Index>(b / C), static_cast<Eigen::Index>(b % C));
    if (va != vb) return va > vb;
    return geo.signal(a / C, a % C) > geo.signal(b / C, b % C);
  });
  std::vector<std::size_t> load(st.num_bs() * N, 0), per_user(M, 0);
  ScmaAssignment out{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(C)),
                     AssignmentMode::binary};
  std::vector<char> taken(M * C, 0);
  auto fits = [&](std::size_t k) {
    const std::size_t m = k / C, f = st.serving_bs(m);
    if (per_user_cap > 0 && per_user[m] >= per_user_cap) return false;
    const auto& sc = cbs.subcarriers(k % C);
    return std::none_of(sc.begin(), sc.end(), [&](std::size_t n) { return load[f * N + n] >= reuse_cap; });
  };
  auto toggle = [&](std::size_t k, bool on) {
    const std::size_t m = k / C, f = st.serving_bs(m);
    for (std::size_t n : cbs.subcarriers(k % C)) on ? ++load[f * N + n] : --load[f * N + n];
    on ? ++per_user[m] : --per_user[m];
    taken[k] = on;
  };
  for (std::size_t k : order)
    if (fits(k)) toggle(k, true);

  // Greedy can leave a subcarrier stranded; trade one kept entry for two or
  // more others until no such exchange exists.
  for (bool changed = true; changed;) {
    changed = false;
    for (auto it = order.rbegin(); it != order.rend() && !changed; ++it) {
      if (!taken[*it]) continue;
      toggle(*it, false);
      std::vector<std::size_t> added;
      for (std::size_t k : order)
        if (k != *it && !taken[k] && fits(k)) {
          toggle(k, true);
          added.push_back(k);
        }
      if (added.size() >= 2) {
        changed = true;
        continue;
      }
      for (std::size_t k : added) toggle(k, false);
      toggle(*it, true);
    }
  }
  for (std::size_t k : order)
    if (taken[k]) out.q(static_cast<Eigen::Index>(k / C), static_cast<Eigen::Index>(k % C)) = 1.0;
  return out;
}

/// Number of (BS, subcarrier) pairs whose codebook reuse exceeds K.
inline std::size_t reuse_violations(const ChannelState& st, const CodebookSet& cbs, const ScmaAssignment& q,
                                    std::size_t reuse_cap) {
  const std::size_t N = st.num_subcarriers();
  std::vector<std::size_t> load(st.num_bs() * N, 0);
  for (std::size_t m = 0; m < st.num_users(); ++m)
    for (std::size_t c = 0; c < cbs.size(); ++c)
      if (q.q(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(c)) > 0.0)
        for (std::size_t n : cbs.subcarriers(c)) ++load[st.serving_bs(m) * N + n];
  return static_cast<std::size_t>(std::count_if(load.begin(), load.end(), [&](std::size_t l) { return l > reuse_cap; }));
}

/// Relaxed sum-rate with candidate powers, the quantity the codebook step maximizes.
inline double relaxed_objective(const Geometry& geo, const Eigen::MatrixXd& q, const Eigen::MatrixXd& p_candidate) {
  return sum_log1p(geo.sinr(q, p_candidate));
}

/// Geometric program of the codebook step over the entries of `mask`,
/// condensed around `anchor`:
///   minimize prod D_{m,c}(q) / X_lower_{m,c}(q),  X = D + q_{m,c} S_{m,c} p_{m,c}
/// subject to the per-(BS, subcarrier) reuse cap, the per-BS budget, the
/// optional per-user cap, and q in [rho_floor, 1].
/// Variables are the mask entries in row-major order.
inline convex::GpProblem build_codebook_gp(const Geometry& geo, const Eigen::MatrixXd& p_candidate,
                                           const Eigen::MatrixXd& anchor, const Eigen::MatrixXd& mask,
                                           const SolverConfig& cfg) {
  using convex::Monomial;
  using convex::Posynomial;
  const auto& st = geo.channels();
  const auto& cbs = geo.codebooks();
  const std::size_t M = geo.users(), C = geo.size(), N = st.num_subcarriers();

  struct Var {
    std::size_t m, c;
  };
  std::vector<Var> vars;
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t c = 0; c < C; ++c)
      if (mask(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(c)) > 0.0) vars.push_back({m, c});

  convex::GpProblem gp;
  gp.num_vars = vars.size();
  gp.lower.assign(gp.num_vars, cfg.rho_floor);
  gp.upper.assign(gp.num_vars, 1.0);
  std::vector<double> x(vars.size());
  for (std::size_t v = 0; v < vars.size(); ++v)
    x[v] = anchor(static_cast<Eigen::Index>(vars[v].m), static_cast<Eigen::Index>(vars[v].c));
  auto pc = [&](const Var& v) { return p_candidate(static_cast<Eigen::Index>(v.m), static_cast<Eigen::Index>(v.c)); };

  for (std::size_t v = 0; v < vars.size(); ++v) {
    const auto [m, c] = vars[v];
    const double s = geo.signal(m, c) * pc(vars[v]);
    if (!(s > 0.0)) continue;
    const std::size_t f = st.serving_bs(m);
    Posynomial denom;
    denom.terms.push_back(Monomial{geo.noise(m, c), {}});
    for (std::size_t u = 0; u < vars.size(); ++u) {
      const std::size_t f2 = st.serving_bs(vars[u].m);
      if (f2 == f) continue;
      const double g = geo.cross(f2, m, c, vars[u].c) * pc(vars[u]);
      if (g > 0.0) denom.terms.push_back(Monomial{g, {{u, 1.0}}});
    }
    Posynomial total = denom;
    total.terms.push_back(Monomial{s, {{v, 1.0}}});
    gp.objective.push_back(convex::divide(denom, convex::condense(total, x)));
  }
  if (gp.objective.empty()) gp.objective.push_back(Posynomial{{Monomial{1.0, {}}}});

  const double K = static_cast<double>(cfg.max_reuse_per_subcarrier);
  for (std::size_t f = 0; f < st.num_bs(); ++f) {
    for (std::size_t n = 0; n < N; ++n) {
      Posynomial reuse;
      for (std::size_t v = 0; v < vars.size(); ++v)
        if (st.serving_bs(vars[v].m) == f && cbs.incidence(n, vars[v].c))
          reuse.terms.push_back(Monomial{1.0 / K, {{v, 1.0}}});
      if (reuse.terms.size() > cfg.max_reuse_per_subcarrier) gp.constraints.push_back(std::move(reuse));
    }
    Posynomial budget;
    for (std::size_t v = 0; v < vars.size(); ++v)
      if (st.serving_bs(vars[v].m) == f && pc(vars[v]) > 0.0)
        budget.terms.push_back(Monomial{pc(vars[v]) / st.p_max(f), {{v, 1.0}}});
    if (!budget.terms.empty()) gp.constraints.push_back(std::move(budget));
  }
  if (cfg.codebook_cap_per_user > 0) {
    const double cap = static_cast<double>(cfg.codebook_cap_per_user);
    for (std::size_t m = 0; m < M; ++m) {
      Posynomial per;
      for (std::size_t v = 0; v < vars.size(); ++v)
        if (vars[v].m == m) per.terms.push_back(Monomial{1.0 / cap, {{v, 1.0}}});
      if (per.terms.size() > cfg.codebook_cap_per_user) gp.constraints.push_back(std::move(per));
    }
  }
  return gp;
}

struct CodebookResult {
  ScmaAssignment assignment;  // rounded
  ScmaAssignment relaxed;     // 0 outside the candidate mask
  std::vector<double> objective_history;
  std::size_t gp_iterations = 0;
};

/// Relaxed codebook assignment by successive AGMA condensation, then greedy
/// rounding under the reuse cap. `mask` selects the optimized entries.
inline CodebookResult allocate_codebooks(const Geometry& geo, const ScmaPower& p_candidate, const ScmaAssignment& q_init,
                                         const Eigen::MatrixXd& mask, const SolverConfig& cfg) {
  cfg.validate();
  detail::check_shape(geo, p_candidate.p, "allocate_codebooks");
  detail::check_shape(geo, q_init.q, "allocate_codebooks");
  detail::check_shape(geo, mask, "allocate_codebooks");
  const std::size_t M = geo.users(), C = geo.size();
  for (Eigen::Index k = 0; k < mask.size(); ++k) {
    const double v = q_init.q.data()[k];
    if (mask.data()[k] > 0.0 && !(v > 0.0 && v <= 1.0))
      throw std::invalid_argument("allocate_codebooks: anchor must lie in (0, 1] on optimized entries");
  }

  CodebookResult out;
  Eigen::MatrixXd anchor = q_init.q.cwiseMax(cfg.rho_floor).cwiseMin(1.0).cwiseProduct(mask);
  double best = relaxed_objective(geo, anchor, p_candidate.p);
  out.objective_history.push_back(best);
  for (std::size_t it = 0; it < cfg.condense_iters; ++it) {
    const auto gp = build_codebook_gp(geo, p_candidate.p, anchor, mask, cfg);
    std::vector<double> start;
    for (std::size_t m = 0; m < M; ++m)
      for (std::size_t c = 0; c < C; ++c)
        if (mask(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(c)) > 0.0)
          start.push_back(std::max(0.9 * anchor(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(c)), cfg.rho_floor));
    const auto res = convex::solve_gp(gp, start, cfg.gp);
    out.gp_iterations += res.iterations;
    if (!res.ok())
      throw std::runtime_error("allocate_codebooks: condensed GP infeasible (round " + std::to_string(it) + "): " +
                               res.message);
    Eigen::MatrixXd cand = Eigen::MatrixXd::Zero(anchor.rows(), anchor.cols());
    std::size_t v = 0;
    for (std::size_t m = 0; m < M; ++m)
      for (std::size_t c = 0; c < C; ++c)
        if (mask(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(c)) > 0.0)
          cand(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(c)) = res.x[v++];
    const double val = relaxed_objective(geo, cand, p_candidate.p);
    if (!(val > best)) break;
    const double gain = val - best;
    anchor = std::move(cand);
    best = val;
    out.objective_history.push_back(best);
    if (gain <= cfg.condense_tol * std::max(1.0, std::abs(best))) break;
  }
  out.relaxed = {anchor, AssignmentMode::relaxed};
  out.assignment = round_codebooks(geo, anchor, cfg.max_reuse_per_subcarrier, cfg.round_threshold,
                                   cfg.codebook_cap_per_user);
  return out;
}

inline CodebookResult allocate_codebooks(const ChannelState& st, const CodebookSet& cbs, const ScmaPower& p_candidate,
                                         const ScmaAssignment& q_init, const SolverConfig& cfg) {
  const Geometry geo(st, cbs, detail::interference_of(cfg));
  return allocate_codebooks(geo, p_candidate, q_init, candidate_mask(geo, cfg.scma_candidates_per_codebook), cfg);
}

struct ScmaSolution {
  CodebookSet codebooks;
  ScmaAssignment assignment;
  ScmaPower power;
  double sum_rate = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  bool cycled = false;
  bool stalled = false;  // stopped after stall_iters iterations without a new best
  std::vector<double> best_history;
  std::vector<PowerAllocation> power_solves;
};

namespace detail {

// Powers offered to the codebook step: the allocated power where assigned and
// alive, otherwise the mean allocated power of the cell.
inline Eigen::MatrixXd candidate_powers(const ChannelState& st, const Eigen::MatrixXd& q, const Eigen::MatrixXd& p,
                                        std::size_t slots_per_cell) {
  Eigen::MatrixXd out = p;
  for (std::size_t f = 0; f < st.num_bs(); ++f) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t m : st.users_of(f))
      for (Eigen::Index c = 0; c < q.cols(); ++c)
        if (q(static_cast<Eigen::Index>(m), c) > 0.0) {
          sum += p(static_cast<Eigen::Index>(m), c);
          ++count;
        }
    const double mean = count > 0 && sum > 0.0 ? sum / static_cast<double>(count)
                                               : st.p_max(f) / static_cast<double>(std::max<std::size_t>(slots_per_cell, 1));
    for (std::size_t m : st.users_of(f))
      for (Eigen::Index c = 0; c < q.cols(); ++c) {
        auto& v = out(static_cast<Eigen::Index>(m), c);
        if (q(static_cast<Eigen::Index>(m), c) <= 0.0 || v < 1e-3 * mean) v = mean;
      }
  }
  return out;
}

}  // namespace detail

/// Alternating optimization: SCALE power allocation for the current binary
/// codebook map, then the AGMA/GP codebook step for those powers, until the
/// power matrix stops moving. The best feasible pair seen is returned.
inline ScmaSolution solve_scma(const ChannelState& st, const SolverConfig& cfg) {
  cfg.validate();
  ScmaSolution best;
  best.codebooks = enumerate_codebooks(st.num_subcarriers(), cfg.codebook_size);
  const CodebookSet& cbs = best.codebooks;
  const Geometry geo(st, cbs, detail::interference_of(cfg));
  const Eigen::MatrixXd mask = candidate_mask(geo, cfg.scma_candidates_per_codebook);
  const std::size_t M = st.num_users(), C = cbs.size(), N = st.num_subcarriers(), U = cbs.codebook_size();
  const std::size_t slots = cfg.max_reuse_per_subcarrier * N / U;  // codebooks one cell can hold

  // Uniform interior start that meets the reuse cap on average.
  const double per_sub = static_cast<double>(nomascma::binomial(N - 1, U - 1));
  Eigen::MatrixXd relaxed = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(C));
  for (std::size_t f = 0; f < st.num_bs(); ++f) {
    const double users = static_cast<double>(std::min<std::size_t>(st.users_of(f).size(),
                                                                     cfg.scma_candidates_per_codebook == 0
                                                                         ? st.users_of(f).size()
                                                                         : cfg.scma_candidates_per_codebook));
    const double share = std::min(1.0, static_cast<double>(cfg.max_reuse_per_subcarrier) / (users * per_sub));
    for (std::size_t m : st.users_of(f))
      for (std::size_t c = 0; c < C; ++c)
        if (mask(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(c)) > 0.0)
          relaxed(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(c)) = share;
  }
  ScmaAssignment q = round_codebooks(geo, relaxed, cfg.max_reuse_per_subcarrier, cfg.round_threshold,
                                     cfg.codebook_cap_per_user);

  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(C));
  for (std::size_t f = 0; f < st.num_bs(); ++f) {
    double count = 0.0;
    for (std::size_t m : st.users_of(f)) count += q.q.row(static_cast<Eigen::Index>(m)).sum();
    for (std::size_t m : st.users_of(f))
      for (std::size_t c = 0; c < C; ++c)
        if (q.q(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(c)) > 0.0)
          p(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(c)) = st.p_max(f) / count;
  }

  best.assignment = q;
  best.power = {p};
  best.sum_rate = sum_log1p(geo.sinr(q.q, p));
  const double tol_w = cfg.outer_tol_w(st);
  Eigen::MatrixXd prev_power;
  Eigen::MatrixXd prev_q = q.q;
  std::vector<Eigen::MatrixXd> visited;
  std::size_t no_gain = 0;
  const double interior_hi = 1.0 - 1e-3;

  for (std::size_t k = 0; k < cfg.outer_iters; ++k) {
    auto pr = allocate_power_scma(geo, q, {p}, cfg);
    best.iterations = k + 1;
    const bool improved = pr.sum_rate > best.sum_rate;
    if (improved) {
      best.sum_rate = pr.sum_rate;
      best.assignment = q;
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

    const Eigen::MatrixXd cand = detail::candidate_powers(st, q.q, pr.power.p, slots);
    ScmaAssignment anchor{relaxed.cwiseMax(2.0 * cfg.rho_floor).cwiseMin(interior_hi), AssignmentMode::relaxed};
    auto step = allocate_codebooks(geo, {cand}, anchor, mask, cfg);
    relaxed = step.relaxed.q;
    q = step.assignment;
    // Same stopping rules as the NOMA alternation.
    visited.push_back(prev_q);
    prev_q = q.q;
    if (q.q == visited.back()) {
      best.converged = true;
      break;
    }
    if (std::any_of(visited.begin(), visited.end(), [&](const Eigen::MatrixXd& v) { return v == q.q; })) {
      best.cycled = true;
      break;
    }
    p = cand.cwiseProduct(q.q);
  }
  return best;
}

}  // namespace nomascma::scma

#endif  // NOMASCMA_SCMA_HPP
