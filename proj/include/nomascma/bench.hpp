#ifndef NOMASCMA_BENCH_HPP
#define NOMASCMA_BENCH_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <future>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nomascma/hetnet.hpp"
#include "nomascma/noma.hpp"
#include "nomascma/scma.hpp"
#include "nomascma/solver_config.hpp"

namespace nomascma::bench {

enum class Axis { user_count, cell_count };

inline const char* axis_name(Axis a) { return a == Axis::user_count ? "users" : "cells"; }

inline Axis parse_axis(const std::string& s) {
  if (s == "users") return Axis::user_count;
  if (s == "cells") return Axis::cell_count;
  throw std::invalid_argument("unknown sweep axis '" + s + "' (expected users or cells)");
}

struct SweepSpec {
  Axis axis = Axis::user_count;
  std::vector<std::size_t> values;
  std::vector<std::uint64_t> seeds;
  NetworkConfig base;
  SolverConfig solver;
  std::size_t users_per_added_cell = 2;  // cells axis: users of each cell beyond the base list
  bool timing = false;                   // record wall time; off keeps output byte-stable
  std::size_t jobs = 1;                  // scenarios solved concurrently

  void validate() const {
    if (values.empty()) throw std::invalid_argument("SweepSpec: values must be non-empty");
    for (std::size_t k = 1; k < values.size(); ++k)
      if (values[k] <= values[k - 1]) throw std::invalid_argument("SweepSpec: values must be strictly ascending");
    if (seeds.empty()) throw std::invalid_argument("SweepSpec: seeds must be non-empty");
    if (users_per_added_cell < 1) throw std::invalid_argument("SweepSpec: users_per_added_cell must be >= 1");
    solver.validate();
  }
};

struct SweepRow {
  std::size_t axis_value = 0;
  std::uint64_t seed = 0;
  double noma_sum_rate = 0.0;  // nats; NaN when the solve failed
  double scma_sum_rate = 0.0;
  std::size_t noma_iters = 0;
  std::size_t scma_iters = 0;
  double wall_ms = 0.0;
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
};

struct SweepResult {
  Axis axis = Axis::user_count;
  std::vector<SweepRow> rows;

  std::size_t failures() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.ok(); }));
  }
};

/// Scenario for one sweep point. The users axis spreads M users round-robin
/// over the base BSs; the cells axis keeps the first F base cells (with their
/// user counts and budgets) and appends cells with `users_per_added_cell`
/// users and the last listed budget.
inline NetworkConfig sweep_config(const SweepSpec& spec, std::size_t value, std::uint64_t seed) {
  NetworkConfig cfg = spec.base;
  cfg.seed = seed;
  if (spec.axis == Axis::user_count) {
    const std::size_t F = cfg.num_bs();
    if (value < F)
      throw std::invalid_argument("sweep: " + std::to_string(value) + " users cannot cover " + std::to_string(F) + " cells");
    cfg.users_per_bs.assign(F, 0);
    for (std::size_t k = 0; k < value; ++k) ++cfg.users_per_bs[k % F];
  } else {
    if (value < 1) throw std::invalid_argument("sweep: need at least one cell");
    cfg.num_small_cells = value - 1;
    cfg.users_per_bs.resize(value, spec.users_per_added_cell);
    cfg.p_max_w.resize(value, cfg.p_max_w.back());
  }
  cfg.validate();
  return cfg;
}

inline SweepRow run_point(const SweepSpec& spec, std::size_t value, std::uint64_t seed) {
  SweepRow row;
  row.axis_value = value;
  row.seed = seed;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const ChannelState st = generate_scenario(sweep_config(spec, value, seed));
    const auto n = noma::solve_noma(st, spec.solver);
    const auto s = scma::solve_scma(st, spec.solver);
    row.noma_sum_rate = n.sum_rate;
    row.scma_sum_rate = s.sum_rate;
    row.noma_iters = n.iterations;
    row.scma_iters = s.iterations;
  } catch (const std::exception& e) {
    row.noma_sum_rate = row.scma_sum_rate = std::numeric_limits<double>::quiet_NaN();
    row.error = e.what();
  }
  if (spec.timing)
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

/// Solves NOMA and SCMA on the same drop for every (value, seed). Rows come
/// back ordered by (value, seed) whatever the completion order.
inline SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  SweepResult out;
  out.axis = spec.axis;
  std::vector<std::pair<std::size_t, std::uint64_t>> points;
  for (auto v : spec.values)
    for (auto s : spec.seeds) points.emplace_back(v, s);
  out.rows.resize(points.size());
  const std::size_t jobs = std::max<std::size_t>(1, spec.jobs);
  for (std::size_t start = 0; start < points.size(); start += jobs) {
    const std::size_t end = std::min(points.size(), start + jobs);
    if (jobs == 1) {
      out.rows[start] = run_point(spec, points[start].first, points[start].second);
      continue;
    }
    std::vector<std::future<SweepRow>> batch;
    for (std::size_t k = start; k < end; ++k)
      batch.push_back(std::async(std::launch::async, run_point, std::cref(spec), points[k].first, points[k].second));
    for (std::size_t k = start; k < end; ++k) out.rows[k] = batch[k - start].get();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Output

inline constexpr const char* kCsvHeader =
    "axis,axis_value,seed,noma_sumrate_nats,scma_sumrate_nats,noma_iters,scma_iters,wall_ms";

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// CSV with one line per row. `bits` converts rates by 1/ln 2 and renames the
/// rate columns accordingly.
inline std::string to_csv(const SweepResult& r, bool bits = false) {
  const double scale = bits ? 1.0 / std::log(2.0) : 1.0;
  std::string header = kCsvHeader;
  if (bits) {
    for (auto pos = header.find("_nats"); pos != std::string::npos; pos = header.find("_nats"))
      header.replace(pos, 5, "_bits");
  }
  std::ostringstream os;
  os << header << '\n';
  for (const auto& row : r.rows)
    os << axis_name(r.axis) << ',' << row.axis_value << ',' << row.seed << ','
       << format_double(row.noma_sum_rate * scale) << ',' << format_double(row.scma_sum_rate * scale) << ','
       << row.noma_iters << ',' << row.scma_iters << ',' << format_double(row.wall_ms) << '\n';
  return os.str();
}

struct PointStats {
  std::size_t axis_value = 0;
  std::size_t count = 0;  // successful rows
  double noma_mean = 0.0, noma_std = 0.0;
  double scma_mean = 0.0, scma_std = 0.0;
};

/// Mean and sample standard deviation (n - 1) per axis value over the
/// successful rows; a single sample has deviation 0.
inline std::vector<PointStats> summarize(const SweepResult& r) {
  std::map<std::size_t, std::vector<const SweepRow*>> groups;
  for (const auto& row : r.rows)
    if (row.ok()) groups[row.axis_value].push_back(&row);
  std::vector<PointStats> out;
  for (const auto& [value, rows] : groups) {
    PointStats p;
    p.axis_value = value;
    p.count = rows.size();
    auto stats = [&](auto get, double& mean, double& sd) {
      double s = 0.0;
      for (const auto* row : rows) s += get(*row);
      mean = s / static_cast<double>(rows.size());
      double ss = 0.0;
      for (const auto* row : rows) ss += (get(*row) - mean) * (get(*row) - mean);
      sd = rows.size() > 1 ? std::sqrt(ss / static_cast<double>(rows.size() - 1)) : 0.0;
    };
    stats([](const SweepRow& x) { return x.noma_sum_rate; }, p.noma_mean, p.noma_std);
    stats([](const SweepRow& x) { return x.scma_sum_rate; }, p.scma_mean, p.scma_std);
    out.push_back(p);
  }
  return out;
}

/// Whitespace-separated columns, one line per axis value, with a commented
/// header; readable by gnuplot and most plotting tools.
inline std::string to_plotdata(const SweepResult& r, bool bits = false) {
  const double scale = bits ? 1.0 / std::log(2.0) : 1.0;
  std::ostringstream os;
  os << "# axis=" << axis_name(r.axis) << " unit=" << (bits ? "bits" : "nats") << '\n';
  os << "# axis_value noma_mean noma_std scma_mean scma_std samples\n";
  for (const auto& p : summarize(r))
    os << p.axis_value << ' ' << format_double(p.noma_mean * scale) << ' ' << format_double(p.noma_std * scale) << ' '
       << format_double(p.scma_mean * scale) << ' ' << format_double(p.scma_std * scale) << ' ' << p.count << '\n';
  return os.str();
}

/// Parses the output of to_csv (nats form). Error messages are not part of
/// the CSV, so failed rows come back with NaN rates and a generic error.
inline SweepResult parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw std::runtime_error("parse_csv: unexpected header");
  SweepResult out;
  bool axis_seen = false;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 8) throw std::runtime_error("parse_csv: line " + std::to_string(lineno) + " has " + std::to_string(f.size()) + " fields");
    const Axis a = parse_axis(f[0]);
    if (axis_seen && a != out.axis) throw std::runtime_error("parse_csv: mixed axes");
    out.axis = a;
    axis_seen = true;
    SweepRow row;
    try {
      row.axis_value = std::stoul(f[1]);
      row.seed = std::stoull(f[2]);
      row.noma_sum_rate = std::stod(f[3]);
      row.scma_sum_rate = std::stod(f[4]);
      row.noma_iters = std::stoul(f[5]);
      row.scma_iters = std::stoul(f[6]);
      row.wall_ms = std::stod(f[7]);
    } catch (const std::exception&) {
      throw std::runtime_error("parse_csv: malformed number on line " + std::to_string(lineno));
    }
    if (std::isnan(row.noma_sum_rate) || std::isnan(row.scma_sum_rate)) row.error = "solver failure";
    out.rows.push_back(row);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Brute-force oracle

enum class Scheme { noma, scma };

inline Scheme parse_scheme(const std::string& s) {
  if (s == "noma") return Scheme::noma;
  if (s == "scma") return Scheme::scma;
  throw std::invalid_argument("unknown scheme '" + s + "' (expected noma or scma)");
}

struct OracleResult {
  double sum_rate = 0.0;
  std::size_t assignments = 0;  // binary assignments examined
  std::vector<double> grid;     // power levels of the macro budget, for reference
};

inline constexpr std::size_t kOracleMaxAssignments = 10000;
inline constexpr std::size_t kOracleMaxGrid = 100;
inline constexpr double kOracleMaxEvaluations = 5e8;

/// Geometric grid of `points` levels from p_floor to p_max inclusive.
inline std::vector<double> power_grid(double p_floor, double p_max, std::size_t points) {
  if (points < 1 || points > kOracleMaxGrid)
    throw std::invalid_argument("power_grid: grid points must be in [1, " + std::to_string(kOracleMaxGrid) + "]");
  if (!(p_floor > 0.0 && p_max >= p_floor)) throw std::invalid_argument("power_grid: need 0 < p_floor <= p_max");
  if (points == 1) return {p_max};
  std::vector<double> g(points);
  const double ratio = std::log(p_max / p_floor) / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) g[k] = p_floor * std::exp(ratio * static_cast<double>(k));
  g.back() = p_max;
  return g;
}

namespace detail {

// Upper-left Pareto frontier of (power, rate): ascending power, strictly
// ascending rate.
using Frontier = std::vector<std::pair<double, double>>;

inline Frontier prune(Frontier pts, double budget) {
  pts.erase(std::remove_if(pts.begin(), pts.end(), [&](const auto& x) { return x.first > budget * (1.0 + 1e-12); }),
            pts.end());
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first < b.first : a.second > b.second;
  });
  Frontier out;
  for (const auto& p : pts)
    if (out.empty() || p.second > out.back().second) out.push_back(p);
  return out;
}

inline Frontier combine(const Frontier& a, const Frontier& b, double budget) {
  Frontier all;
  all.reserve(a.size() * b.size());
  for (const auto& x : a)
    for (const auto& y : b)
      if (x.first + y.first <= budget * (1.0 + 1e-12)) all.emplace_back(x.first + y.first, x.second + y.second);
  return prune(std::move(all), budget);
}

// Enumerate every vector in {levels}^k, calling visit(powers) for each.
template <class Visit>
void for_each_grid_point(const std::vector<double>& levels, std::size_t k, Visit visit) {
  std::vector<std::size_t> idx(k, 0);
  std::vector<double> p(k, levels.empty() ? 0.0 : levels[0]);
  while (true) {
    visit(p);
    std::size_t j = 0;
    while (j < k && ++idx[j] == levels.size()) {
      idx[j] = 0;
      p[j] = levels[0];
      ++j;
    }
    if (j == k) break;
    p[j] = levels[idx[j]];
  }
}

// Subsets of `users` with at most `cap` members.
inline std::vector<std::vector<std::size_t>> small_subsets(const std::vector<std::size_t>& users, std::size_t cap) {
  std::vector<std::vector<std::size_t>> out;
  const std::size_t n = users.size();
  if (n > 20) throw std::invalid_argument("oracle: too many users in one cell");
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) > cap) continue;
    std::vector<std::size_t> s;
    for (std::size_t k = 0; k < n; ++k)
      if (mask & (1u << k)) s.push_back(users[k]);
    out.push_back(std::move(s));
  }
  return out;
}

inline double noma_oracle_single_cell(const ChannelState& st, const std::vector<double>& levels, std::size_t L_T,
                                      std::size_t& assignments) {
  const double budget = st.p_max(0);
  const auto subsets = small_subsets(st.users_of(0), L_T);
  const auto M = static_cast<Eigen::Index>(st.num_users()), N = static_cast<Eigen::Index>(st.num_subcarriers());
  Frontier total{{0.0, 0.0}};
  for (Eigen::Index n = 0; n < N; ++n) {
    Frontier fr;
    for (const auto& s : subsets) {
      noma::NomaAssignment rho{Eigen::MatrixXd::Zero(M, N), noma::AssignmentMode::binary};
      for (auto m : s) rho.rho(static_cast<Eigen::Index>(m), n) = 1.0;
      if (s.empty()) {
        fr.emplace_back(0.0, 0.0);
        continue;
      }
      for_each_grid_point(levels, s.size(), [&](const std::vector<double>& p) {
        double used = 0.0;
        noma::NomaPower pw{Eigen::MatrixXd::Zero(M, N)};
        for (std::size_t k = 0; k < s.size(); ++k) {
          pw.p(static_cast<Eigen::Index>(s[k]), n) = p[k];
          used += p[k];
        }
        if (used > budget * (1.0 + 1e-12)) return;
        fr.emplace_back(used, noma::noma_sum_rate(st, rho, pw));
      });
    }
    fr = prune(std::move(fr), budget);
    total = combine(total, fr, budget);
  }
  assignments = 1;
  for (Eigen::Index n = 0; n < N; ++n) assignments *= subsets.size();
  return total.empty() ? 0.0 : total.back().second;
}

inline std::size_t count_noma_assignments(const ChannelState& st, std::size_t L_T) {
  double count = 1.0;
  for (std::size_t f = 0; f < st.num_bs(); ++f) {
    const double per = static_cast<double>(small_subsets(st.users_of(f), L_T).size());
    count *= std::pow(per, static_cast<double>(st.num_subcarriers()));
  }
  return count > 1e18 ? std::numeric_limits<std::size_t>::max() : static_cast<std::size_t>(count);
}

// Plain enumeration over assignments and the power grid, any number of cells.
template <class Assignments, class Evaluate>
double enumerate_all(const ChannelState& st, const Assignments& assignments, const std::vector<double>& levels,
                     Evaluate evaluate) {
  double best = 0.0;
  double evaluations = 0.0;
  for (const auto& a : assignments) evaluations += std::pow(static_cast<double>(levels.size()), static_cast<double>(a.size()));
  if (evaluations > kOracleMaxEvaluations)
    throw std::invalid_argument("oracle: " + format_double(evaluations) + " grid evaluations exceed the limit of " +
                                format_double(kOracleMaxEvaluations));
  std::vector<double> used(st.num_bs());
  for (const auto& a : assignments) {
    for_each_grid_point(levels, a.size(), [&](const std::vector<double>& p) {
      std::fill(used.begin(), used.end(), 0.0);
      for (std::size_t k = 0; k < a.size(); ++k) used[st.serving_bs(a[k].first)] += p[k];
      for (std::size_t f = 0; f < used.size(); ++f)
        if (used[f] > st.p_max(f) * (1.0 + 1e-12)) return;
      best = std::max(best, evaluate(a, p));
    });
  }
  return best;
}

}  // namespace detail

/// Exhaustive maximum of the true sum-rate over binary assignments and a
/// geometric power grid (each cell's grid tops out at its own budget scaled
/// from the macro grid). Single-cell instances merge per-group Pareto
/// frontiers, which is exact over the grid; multi-cell instances enumerate.
inline OracleResult brute_force_oracle(const ChannelState& st, Scheme scheme, std::size_t grid_points,
                                       const SolverConfig& cfg = {}) {
  cfg.validate();
  OracleResult out;
  out.grid = power_grid(cfg.p_floor, st.p_max(0), grid_points);
  const std::size_t F = st.num_bs();
  auto levels_for = [&](std::size_t f) { return power_grid(cfg.p_floor, st.p_max(f), grid_points); };

  if (scheme == Scheme::noma) {
    const std::size_t count = detail::count_noma_assignments(st, cfg.max_users_per_subcarrier);
    if (count > kOracleMaxAssignments)
      throw std::invalid_argument("oracle: " + std::to_string(count) + " NOMA assignments exceed the limit of " +
                                  std::to_string(kOracleMaxAssignments));
    if (F == 1) {
      out.sum_rate = detail::noma_oracle_single_cell(st, out.grid, cfg.max_users_per_subcarrier, out.assignments);
      return out;
    }
    // Multi-cell: all assignments as (user, subcarrier) lists.
    const auto M = static_cast<Eigen::Index>(st.num_users()), N = static_cast<Eigen::Index>(st.num_subcarriers());
    std::vector<std::vector<std::vector<std::size_t>>> choices;  // per (f, n)
    for (std::size_t f = 0; f < F; ++f)
      for (Eigen::Index n = 0; n < N; ++n) choices.push_back(detail::small_subsets(st.users_of(f), cfg.max_users_per_subcarrier));
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> assignments;
    std::vector<std::size_t> idx(choices.size(), 0);
    while (true) {
      std::vector<std::pair<std::size_t, std::size_t>> a;
      for (std::size_t k = 0; k < choices.size(); ++k)
        for (auto m : choices[k][idx[k]]) a.emplace_back(m, k % static_cast<std::size_t>(N));
      assignments.push_back(std::move(a));
      std::size_t j = 0;
      while (j < idx.size() && ++idx[j] == choices[j].size()) idx[j++] = 0;
      if (j == idx.size()) break;
    }
    out.assignments = assignments.size();
    // Grids differ per cell only by scale; enumerate on normalized levels.
    std::vector<double> unit = power_grid(cfg.p_floor / st.p_max(0), 1.0, grid_points);
    out.sum_rate = detail::enumerate_all(st, assignments, unit, [&](const auto& a, const std::vector<double>& p) {
      noma::NomaAssignment rho{Eigen::MatrixXd::Zero(M, N), noma::AssignmentMode::binary};
      noma::NomaPower pw{Eigen::MatrixXd::Zero(M, N)};
      for (std::size_t k = 0; k < a.size(); ++k) {
        const auto m = static_cast<Eigen::Index>(a[k].first), n = static_cast<Eigen::Index>(a[k].second);
        rho.rho(m, n) = 1.0;
        pw.p(m, n) = p[k] * st.p_max(st.serving_bs(a[k].first));
      }
      return noma::noma_sum_rate(st, rho, pw);
    });
    (void)levels_for;
    return out;
  }

  // SCMA: every binary q meeting the reuse cap (and the optional per-user cap).
  const auto cbs = scma::enumerate_codebooks(st.num_subcarriers(), cfg.codebook_size);
  const std::size_t M = st.num_users(), C = cbs.size(), N = st.num_subcarriers();
  const std::size_t entries = M * C;
  if (entries > 30) throw std::invalid_argument("oracle: " + std::to_string(entries) + " (user, codebook) pairs is too many to enumerate");
  const scma::Geometry geo(st, cbs, cfg.literal_scma_interference ? scma::Interference::literal : scma::Interference::restricted);

  std::vector<std::vector<std::size_t>> feasible;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << entries); ++mask) {
    std::vector<std::size_t> load(F * N, 0), per_user(M, 0);
    std::vector<std::size_t> on;
    bool ok = true;
    for (std::size_t e = 0; e < entries && ok; ++e) {
      if (!(mask >> e & 1u)) continue;
      const std::size_t m = e / C, c = e % C, f = st.serving_bs(m);
      for (std::size_t n : cbs.subcarriers(c))
        if (++load[f * N + n] > cfg.max_reuse_per_subcarrier) ok = false;
      if (cfg.codebook_cap_per_user > 0 && ++per_user[m] > cfg.codebook_cap_per_user) ok = false;
      on.push_back(e);
    }
    if (!ok) continue;
    feasible.push_back(std::move(on));
    if (feasible.size() > kOracleMaxAssignments)
      throw std::invalid_argument("oracle: more than " + std::to_string(kOracleMaxAssignments) + " SCMA assignments");
  }
  out.assignments = feasible.size();

  if (F == 1) {
    // No cross-cell interference: every entry is its own group.
    const double budget = st.p_max(0);
    std::vector<detail::Frontier> single(entries);
    for (std::size_t e = 0; e < entries; ++e) {
      single[e].emplace_back(0.0, 0.0);
      const double a = geo.signal(e / C, e % C) / geo.noise(e / C, e % C);
      for (double p : out.grid) single[e].emplace_back(p, std::log1p(a * p));
      single[e] = detail::prune(std::move(single[e]), budget);
    }
    for (const auto& on : feasible) {
      detail::Frontier total{{0.0, 0.0}};
      for (auto e : on) total = detail::combine(total, single[e], budget);
      if (!total.empty()) out.sum_rate = std::max(out.sum_rate, total.back().second);
    }
    return out;
  }

  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> assignments;
  for (const auto& on : feasible) {
    std::vector<std::pair<std::size_t, std::size_t>> a;
    for (auto e : on) a.emplace_back(e / C, e % C);
    assignments.push_back(std::move(a));
  }
  std::vector<double> unit = power_grid(cfg.p_floor / st.p_max(0), 1.0, grid_points);
  out.sum_rate = detail::enumerate_all(st, assignments, unit, [&](const auto& a, const std::vector<double>& p) {
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(C));
    Eigen::MatrixXd pw = q;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const auto m = static_cast<Eigen::Index>(a[k].first), c = static_cast<Eigen::Index>(a[k].second);
      q(m, c) = 1.0;
      pw(m, c) = p[k] * st.p_max(st.serving_bs(a[k].first));
    }
    return sum_log1p(geo.sinr(q, pw));
  });
  return out;
}

}  // namespace nomascma::bench

#endif  // NOMASCMA_BENCH_HPP
