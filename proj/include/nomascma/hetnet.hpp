#ifndef NOMASCMA_HETNET_HPP
#define NOMASCMA_HETNET_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nomascma/random.hpp"

namespace nomascma {

/// Downlink HetNet scenario parameters. Base station 0 is the macro cell.
struct NetworkConfig {
  double macro_radius_m = 500.0;
  double small_radius_m = 20.0;
  std::size_t num_small_cells = 2;
  std::vector<std::size_t> users_per_bs{2, 2, 2};
  std::size_t num_subcarriers = 8;
  double pathloss_exponent = -2.0;
  double noise_power_w = 1e-12;
  std::vector<double> p_max_w{10.0, 2.0, 2.0};
  std::uint64_t seed = 1;

  std::size_t num_bs() const { return num_small_cells + 1; }
  std::size_t num_users() const {
    return std::accumulate(users_per_bs.begin(), users_per_bs.end(), std::size_t{0});
  }

  void validate() const {
    if (!(small_radius_m > 0.0) || !(macro_radius_m > small_radius_m))
      throw std::invalid_argument("NetworkConfig: need macro_radius > small_radius > 0");
    if (users_per_bs.size() != num_bs())
      throw std::invalid_argument("NetworkConfig: users_per_bs must list one count per BS (" +
                                  std::to_string(num_bs()) + ")");
    if (p_max_w.size() != num_bs())
      throw std::invalid_argument("NetworkConfig: p_max_w must list one budget per BS (" +
                                  std::to_string(num_bs()) + ")");
    for (auto u : users_per_bs)
      if (u < 1) throw std::invalid_argument("NetworkConfig: every BS needs at least one user");
    for (auto p : p_max_w)
      if (!(p > 0.0) || !std::isfinite(p))
        throw std::invalid_argument("NetworkConfig: p_max entries must be positive");
    if (num_subcarriers < 1) throw std::invalid_argument("NetworkConfig: num_subcarriers must be >= 1");
    if (!(noise_power_w > 0.0)) throw std::invalid_argument("NetworkConfig: noise_power must be positive");
    if (!std::isfinite(pathloss_exponent))
      throw std::invalid_argument("NetworkConfig: pathloss_exponent must be finite");
  }
};

/// Geometry of one scenario drop. Users are grouped by serving BS in
/// ascending BS order.
struct Topology {
  std::vector<Point> bs_positions;
  std::vector<Point> user_positions;
  std::vector<std::size_t> association;
};

/// Channel power gains |h|^2 for every (BS, user, subcarrier) triple, the
/// per-(user, subcarrier) receiver noise, the user association, and the
/// per-BS transmit budgets.
class ChannelState {
public:
  ChannelState() = default;

  ChannelState(std::size_t num_bs, std::vector<std::size_t> serving_bs, std::size_t num_subcarriers,
               std::vector<double> p_max_w, double noise_w)
      : num_bs_(num_bs),
        num_users_(serving_bs.size()),
        num_subcarriers_(num_subcarriers),
        serving_(std::move(serving_bs)),
        p_max_(std::move(p_max_w)),
        gain_(num_bs_ * num_users_ * num_subcarriers_, 0.0),
        noise_(num_users_ * num_subcarriers_, noise_w) {
    if (num_bs_ == 0 || num_subcarriers_ == 0)
      throw std::invalid_argument("ChannelState: empty dimensions");
    if (p_max_.size() != num_bs_) throw std::invalid_argument("ChannelState: one budget per BS required");
    if (!(noise_w > 0.0)) throw std::invalid_argument("ChannelState: noise must be positive");
    users_of_.resize(num_bs_);
    for (std::size_t m = 0; m < num_users_; ++m) {
      if (serving_[m] >= num_bs_) throw std::invalid_argument("ChannelState: serving BS out of range");
      users_of_[serving_[m]].push_back(m);
    }
  }

  std::size_t num_bs() const { return num_bs_; }
  std::size_t num_users() const { return num_users_; }
  std::size_t num_subcarriers() const { return num_subcarriers_; }

  double gain(std::size_t f, std::size_t m, std::size_t n) const { return gain_[index(f, m, n)]; }
  void set_gain(std::size_t f, std::size_t m, std::size_t n, double g) {
    if (!(g >= 0.0)) throw std::invalid_argument("ChannelState: gains must be nonnegative");
    gain_[index(f, m, n)] = g;
  }
  /// Gain from the serving BS of `m`.
  double own_gain(std::size_t m, std::size_t n) const { return gain(serving_[m], m, n); }

  double noise(std::size_t m, std::size_t n) const { return noise_[m * num_subcarriers_ + n]; }
  void set_noise(std::size_t m, std::size_t n, double w) {
    if (!(w > 0.0)) throw std::invalid_argument("ChannelState: noise must be positive");
    noise_[m * num_subcarriers_ + n] = w;
  }

  std::size_t serving_bs(std::size_t m) const { return serving_[m]; }
  const std::vector<std::size_t>& users_of(std::size_t f) const { return users_of_[f]; }
  double p_max(std::size_t f) const { return p_max_[f]; }
  const std::vector<double>& p_max() const { return p_max_; }

private:
  std::size_t index(std::size_t f, std::size_t m, std::size_t n) const {
    return (f * num_users_ + m) * num_subcarriers_ + n;
  }

  std::size_t num_bs_ = 0;
  std::size_t num_users_ = 0;
  std::size_t num_subcarriers_ = 0;
  std::vector<std::size_t> serving_;
  std::vector<std::vector<std::size_t>> users_of_;
  std::vector<double> p_max_;
  std::vector<double> gain_;
  std::vector<double> noise_;
};

inline constexpr std::size_t kMaxPlacementRetries = 10000;
inline constexpr double kMinDistanceM = 1.0;

namespace detail {
enum StreamTag : std::uint64_t { kBsStream = 1, kUserStream = 2, kFadingStream = 3 };
}

/// Macro BS at the origin, small BSs uniform in the macro disk with pairwise
/// separation of at least two small radii, users uniform in their own cell.
inline Topology generate_topology(const NetworkConfig& cfg, const RandomStream& rng) {
  cfg.validate();
  Topology topo;
  topo.bs_positions.push_back({0.0, 0.0});
  const double min_sep = 2.0 * cfg.small_radius_m;
  for (std::size_t f = 1; f < cfg.num_bs(); ++f) {
    auto g = rng.substream({detail::kBsStream, f});
    bool placed = false;
    for (std::size_t attempt = 0; attempt < kMaxPlacementRetries && !placed; ++attempt) {
      const Point c = uniform_in_disk(g, topo.bs_positions[0], cfg.macro_radius_m);
      placed = std::all_of(topo.bs_positions.begin() + 1, topo.bs_positions.end(),
                           [&](const Point& o) { return distance(c, o) >= min_sep; });
      if (placed) topo.bs_positions.push_back(c);
    }
    if (!placed)
      throw std::runtime_error("generate_topology: could not place small cell " + std::to_string(f) +
                               " with separation " + std::to_string(min_sep) + " m after " +
                               std::to_string(kMaxPlacementRetries) + " retries (over-dense configuration)");
  }
  for (std::size_t f = 0; f < cfg.num_bs(); ++f) {
    const double radius = f == 0 ? cfg.macro_radius_m : cfg.small_radius_m;
    for (std::size_t i = 0; i < cfg.users_per_bs[f]; ++i) {
      auto g = rng.substream({detail::kUserStream, f, i});
      topo.user_positions.push_back(uniform_in_disk(g, topo.bs_positions[f], radius));
      topo.association.push_back(f);
    }
  }
  return topo;
}

/// Path-loss times unit-mean exponential fading, gain = e * d^(2 xi), for all
/// BS-user pairs so cross-cell interference is available.
inline ChannelState generate_channels(const Topology& topo, const NetworkConfig& cfg, const RandomStream& rng) {
  cfg.validate();
  if (topo.bs_positions.size() != cfg.num_bs() || topo.user_positions.size() != cfg.num_users() ||
      topo.association.size() != topo.user_positions.size())
    throw std::invalid_argument("generate_channels: topology does not match config");
  ChannelState state(cfg.num_bs(), topo.association, cfg.num_subcarriers, cfg.p_max_w, cfg.noise_power_w);

  // Local index of each user inside its cell keys the fading substream.
  std::vector<std::size_t> local(topo.association.size());
  std::vector<std::size_t> seen(cfg.num_bs(), 0);
  for (std::size_t m = 0; m < topo.association.size(); ++m) local[m] = seen[topo.association[m]]++;

  for (std::size_t f = 0; f < cfg.num_bs(); ++f) {
    for (std::size_t m = 0; m < topo.user_positions.size(); ++m) {
      const double d = std::max(kMinDistanceM, distance(topo.bs_positions[f], topo.user_positions[m]));
      const double pathloss = std::pow(d, 2.0 * cfg.pathloss_exponent);
      auto g = rng.substream({detail::kFadingStream, f, topo.association[m], local[m]});
      for (std::size_t n = 0; n < cfg.num_subcarriers; ++n)
        state.set_gain(f, m, n, unit_exponential(g) * pathloss);
    }
  }
  return state;
}

inline ChannelState generate_scenario(const NetworkConfig& cfg) {
  const RandomStream rng(cfg.seed);
  return generate_channels(generate_topology(cfg, rng), cfg, rng);
}

// ---------------------------------------------------------------------------
// Scenario file: one `key=value` per line, `#` starts a comment.

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw std::invalid_argument("scenario: bad number for " + key + ": '" + v + "'");
  return out;
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("scenario: bad integer for " + key + ": '" + v + "'");
  return std::stoull(v);
}

template <class T, class Parse>
std::vector<T> parse_list(const std::string& key, const std::string& v, Parse parse) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(static_cast<T>(parse(key, trim(item))));
  if (out.empty()) throw std::invalid_argument("scenario: empty list for " + key);
  return out;
}

}  // namespace detail

inline NetworkConfig parse_network_config(std::istream& in) {
  NetworkConfig cfg;
  bool has_small = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("scenario line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (key == "macro_radius_m") {
      cfg.macro_radius_m = detail::parse_double(key, val);
    } else if (key == "small_radius_m") {
      cfg.small_radius_m = detail::parse_double(key, val);
    } else if (key == "num_small_cells") {
      cfg.num_small_cells = detail::parse_uint(key, val);
      has_small = true;
    } else if (key == "users_per_bs") {
      cfg.users_per_bs = detail::parse_list<std::size_t>(key, val, detail::parse_uint);
    } else if (key == "num_subcarriers") {
      cfg.num_subcarriers = detail::parse_uint(key, val);
    } else if (key == "pathloss_exponent") {
      cfg.pathloss_exponent = detail::parse_double(key, val);
    } else if (key == "noise_power_w") {
      cfg.noise_power_w = detail::parse_double(key, val);
    } else if (key == "p_max_w") {
      cfg.p_max_w = detail::parse_list<double>(key, val, detail::parse_double);
    } else if (key == "seed") {
      cfg.seed = detail::parse_uint(key, val);
    } else {
      throw std::invalid_argument("scenario line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  if (!has_small && !cfg.users_per_bs.empty()) cfg.num_small_cells = cfg.users_per_bs.size() - 1;
  cfg.validate();
  return cfg;
}

inline NetworkConfig load_network_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  return parse_network_config(in);
}

}  // namespace nomascma

#endif  // NOMASCMA_HETNET_HPP
