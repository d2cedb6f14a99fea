#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "nomascma/hetnet.hpp"

using namespace nomascma;

namespace {

NetworkConfig single_cell(std::size_t users) {
  NetworkConfig cfg;
  cfg.num_small_cells = 0;
  cfg.users_per_bs = {users};
  cfg.p_max_w = {10.0};
  return cfg;
}

}  // namespace

TEST(Topology, SingleCellSingleUser) {
  const auto cfg = single_cell(1);
  const auto topo = generate_topology(cfg, RandomStream(7));
  ASSERT_EQ(topo.bs_positions.size(), 1u);
  EXPECT_EQ(topo.bs_positions[0].x, 0.0);
  EXPECT_EQ(topo.bs_positions[0].y, 0.0);
  ASSERT_EQ(topo.user_positions.size(), 1u);
  EXPECT_LE(distance(topo.user_positions[0], topo.bs_positions[0]), cfg.macro_radius_m);
  EXPECT_EQ(topo.association, std::vector<std::size_t>{0});
}

TEST(Topology, SmallCellsSeparated) {
  NetworkConfig cfg;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto topo = generate_topology(cfg, RandomStream(seed));
    ASSERT_EQ(topo.bs_positions.size(), 3u);
    EXPECT_GE(distance(topo.bs_positions[1], topo.bs_positions[2]), 40.0);
    for (std::size_t m = 0; m < topo.user_positions.size(); ++m) {
      const std::size_t f = topo.association[m];
      EXPECT_LE(distance(topo.user_positions[m], topo.bs_positions[f]), f == 0 ? 500.0 : 20.0);
    }
  }
}

TEST(Topology, Deterministic) {
  NetworkConfig cfg;
  cfg.seed = 42;
  const auto a = generate_scenario(cfg);
  const auto b = generate_scenario(cfg);
  for (std::size_t f = 0; f < a.num_bs(); ++f)
    for (std::size_t m = 0; m < a.num_users(); ++m)
      for (std::size_t n = 0; n < a.num_subcarriers(); ++n) EXPECT_EQ(a.gain(f, m, n), b.gain(f, m, n));
}

TEST(Topology, AddingCellKeepsExistingDraws) {
  NetworkConfig small;
  NetworkConfig large = small;
  large.num_small_cells = 3;
  large.users_per_bs = {2, 2, 2, 2};
  large.p_max_w = {10, 2, 2, 2};
  const auto a = generate_scenario(small);
  const auto b = generate_scenario(large);
  for (std::size_t f = 0; f < a.num_bs(); ++f)
    for (std::size_t m = 0; m < a.num_users(); ++m) EXPECT_EQ(a.gain(f, m, 0), b.gain(f, m, 0));
}

TEST(Topology, OverDenseConfigurationRejected) {
  NetworkConfig cfg;
  cfg.macro_radius_m = 30.0;
  cfg.num_small_cells = 6;
  cfg.users_per_bs.assign(7, 1);
  cfg.p_max_w.assign(7, 1.0);
  EXPECT_THROW(generate_scenario(cfg), std::runtime_error);
}

TEST(Channels, PathLossAtTenMetres) {
  // e = 1, d = 10 m, xi = -2: 10^(-4).
  EXPECT_NEAR(std::pow(10.0, 2.0 * -2.0), 1e-4, 1e-18);
  Topology topo;
  topo.bs_positions = {{0.0, 0.0}};
  topo.user_positions = {{10.0, 0.0}};
  topo.association = {0};
  auto cfg = single_cell(1);
  cfg.num_subcarriers = 4000;
  const auto st = generate_channels(topo, cfg, RandomStream(3));
  double mean = 0.0;
  for (std::size_t n = 0; n < cfg.num_subcarriers; ++n) mean += st.gain(0, 0, n);
  mean /= static_cast<double>(cfg.num_subcarriers);
  EXPECT_NEAR(mean, 1e-4, 0.1e-4);
}

TEST(Channels, ZeroExponentGivesFadingOnly) {
  Topology topo;
  topo.bs_positions = {{0.0, 0.0}};
  topo.user_positions = {{300.0, 0.0}};
  topo.association = {0};
  auto cfg = single_cell(1);
  cfg.pathloss_exponent = 0.0;
  cfg.num_subcarriers = 4;
  const auto st = generate_channels(topo, cfg, RandomStream(5));
  auto g = RandomStream(5).substream({detail::kFadingStream, 0, 0, 0});
  for (std::size_t n = 0; n < 4; ++n) EXPECT_DOUBLE_EQ(st.gain(0, 0, n), unit_exponential(g));
}

TEST(Channels, GainsNonnegativeAndFadingUnitMean) {
  auto g = RandomStream(11).substream({99});
  double sum = 0.0;
  const int draws = 100000;
  for (int k = 0; k < draws; ++k) {
    const double e = unit_exponential(g);
    ASSERT_GE(e, 0.0);
    sum += e;
  }
  const double mean = sum / draws;
  EXPECT_GE(mean, 0.98);
  EXPECT_LE(mean, 1.02);
}

TEST(Channels, FartherIsWeaker) {
  Topology topo;
  topo.bs_positions = {{0.0, 0.0}};
  topo.user_positions = {{10.0, 0.0}, {50.0, 0.0}};
  topo.association = {0, 0};
  auto cfg = single_cell(2);
  cfg.num_subcarriers = 1;
  cfg.pathloss_exponent = -2.0;
  const auto st = generate_channels(topo, cfg, RandomStream(1));
  // Undo the fading draw to compare path loss alone.
  auto g0 = RandomStream(1).substream({detail::kFadingStream, 0, 0, 0});
  auto g1 = RandomStream(1).substream({detail::kFadingStream, 0, 0, 1});
  EXPECT_GT(st.gain(0, 0, 0) / unit_exponential(g0), st.gain(0, 1, 0) / unit_exponential(g1));
}

TEST(Channels, DistanceFloor) {
  Topology topo;
  topo.bs_positions = {{0.0, 0.0}};
  topo.user_positions = {{0.0, 0.0}};
  topo.association = {0};
  auto cfg = single_cell(1);
  cfg.num_subcarriers = 1;
  const auto st = generate_channels(topo, cfg, RandomStream(1));
  auto g = RandomStream(1).substream({detail::kFadingStream, 0, 0, 0});
  EXPECT_DOUBLE_EQ(st.gain(0, 0, 0), unit_exponential(g));
}

TEST(Config, ParsesScenarioFile) {
  std::istringstream in(
      "# comment\n"
      "macro_radius_m = 400\n"
      "small_radius_m=15\n"
      "users_per_bs = 3, 1\n"
      "num_subcarriers = 6\n"
      "pathloss_exponent = -3\n"
      "noise_power_w = 2e-12\n"
      "p_max_w = 8,1\n"
      "seed = 9\n");
  const auto cfg = parse_network_config(in);
  EXPECT_EQ(cfg.macro_radius_m, 400.0);
  EXPECT_EQ(cfg.small_radius_m, 15.0);
  EXPECT_EQ(cfg.num_small_cells, 1u);
  EXPECT_EQ(cfg.users_per_bs, (std::vector<std::size_t>{3, 1}));
  EXPECT_EQ(cfg.num_subcarriers, 6u);
  EXPECT_EQ(cfg.pathloss_exponent, -3.0);
  EXPECT_EQ(cfg.noise_power_w, 2e-12);
  EXPECT_EQ(cfg.p_max_w, (std::vector<double>{8.0, 1.0}));
  EXPECT_EQ(cfg.seed, 9u);
}

TEST(Config, RejectsBadInput) {
  std::istringstream unknown("colour = red\n");
  EXPECT_THROW(parse_network_config(unknown), std::invalid_argument);
  std::istringstream mismatch("num_small_cells = 1\nusers_per_bs = 1,1,1\np_max_w = 1,1\n");
  EXPECT_THROW(parse_network_config(mismatch), std::invalid_argument);
  NetworkConfig cfg;
  cfg.users_per_bs = {2, 0, 2};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = NetworkConfig{};
  cfg.noise_power_w = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(ChannelStateTest, RejectsInvalidValues) {
  EXPECT_THROW(ChannelState(1, {0}, 1, {}, 1e-12), std::invalid_argument);
  EXPECT_THROW(ChannelState(1, {1}, 1, {1.0}, 1e-12), std::invalid_argument);
  ChannelState st(1, {0}, 1, {1.0}, 1e-12);
  EXPECT_THROW(st.set_gain(0, 0, 0, -1.0), std::invalid_argument);
  EXPECT_THROW(st.set_noise(0, 0, 0.0), std::invalid_argument);
}
