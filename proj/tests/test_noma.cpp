#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "nomascma/noma.hpp"

using namespace nomascma;
using namespace nomascma::noma;

namespace {

// One BS, users with the given gains on every subcarrier, unit noise.
ChannelState cell(std::vector<double> gains, std::size_t subcarriers = 1, double p_max = 10.0, double noise = 1.0) {
  ChannelState st(1, std::vector<std::size_t>(gains.size(), 0), subcarriers, {p_max}, noise);
  for (std::size_t m = 0; m < gains.size(); ++m)
    for (std::size_t n = 0; n < subcarriers; ++n) st.set_gain(0, m, n, gains[m]);
  return st;
}

ChannelState drop(std::uint64_t seed, std::vector<std::size_t> users = {2, 2, 2}, std::size_t subcarriers = 4) {
  NetworkConfig cfg;
  cfg.users_per_bs = std::move(users);
  cfg.num_small_cells = cfg.users_per_bs.size() - 1;
  cfg.p_max_w.assign(cfg.users_per_bs.size(), 2.0);
  cfg.p_max_w[0] = 10.0;
  cfg.num_subcarriers = subcarriers;
  cfg.seed = seed;
  return generate_scenario(cfg);
}

NomaAssignment all_on(const ChannelState& st) {
  NomaAssignment a = NomaAssignment::zeros(st, AssignmentMode::binary);
  a.rho.setOnes();
  return a;
}

}  // namespace

TEST(DecodeOrder, SortsByGain) {
  const auto st = cell({4.0, 1.0, 9.0});
  EXPECT_EQ(decode_order(st, 0, 0), (DecodeOrder{2, 0, 1}));
}

TEST(DecodeOrder, StableOnTies) {
  const auto st = cell({2.0, 2.0, 2.0});
  EXPECT_EQ(decode_order(st, 0, 0), (DecodeOrder{0, 1, 2}));
  const auto one = cell({5.0});
  EXPECT_EQ(decode_order(one, 0, 0), (DecodeOrder{0}));
}

TEST(Sinr, UnassignedIsZero) {
  const auto st = cell({3.0, 1.0});
  auto rho = all_on(st);
  rho.rho(1, 0) = 0.0;
  NomaPower p{Eigen::MatrixXd::Constant(2, 1, 1.0)};
  EXPECT_EQ(noma_sinr(st, rho, p, 0, 1, 0), 0.0);
}

TEST(Sinr, WeakerUserSeesStrongerPower) {
  // g2 = 1, p1 = 1, p2 = 2, noise 1: gamma2 = 2 / (1 + 1).
  const auto st = cell({3.0, 1.0});
  NomaPower p{Eigen::MatrixXd(2, 1)};
  p.p << 1.0, 2.0;
  EXPECT_DOUBLE_EQ(noma_sinr(st, all_on(st), p, 0, 1, 0), 1.0);
  // Strongest user decodes first with no intra-cell interference.
  EXPECT_DOUBLE_EQ(noma_sinr(st, all_on(st), p, 0, 0, 0), 3.0);
}

TEST(Sinr, CrossCellInterferenceUsesVictimGain) {
  ChannelState st(2, {0, 1}, 1, {1.0, 1.0}, 1.0);
  st.set_gain(0, 0, 0, 4.0);
  st.set_gain(1, 1, 0, 2.0);
  st.set_gain(1, 0, 0, 0.5);  // BS 1 -> user 0
  st.set_gain(0, 1, 0, 0.25); // BS 0 -> user 1
  NomaPower p{Eigen::MatrixXd::Constant(2, 1, 2.0)};
  EXPECT_DOUBLE_EQ(noma_sinr(st, all_on(st), p, 0, 0, 0), 8.0 / (1.0 + 1.0));
  EXPECT_DOUBLE_EQ(noma_sinr(st, all_on(st), p, 1, 1, 0), 4.0 / (1.0 + 0.5));
}

TEST(SumRate, Basics) {
  const auto st = cell({1.0});
  EXPECT_EQ(noma_sum_rate(st, all_on(st), NomaPower::zeros(st)), 0.0);
  NomaPower p{Eigen::MatrixXd::Constant(1, 1, 1.0)};
  EXPECT_NEAR(noma_sum_rate(st, all_on(st), p), std::log(2.0), 1e-15);
}

TEST(SumRate, IndependentCellsAdd) {
  ChannelState st(2, {0, 1}, 1, {1.0, 1.0}, 1.0);
  st.set_gain(0, 0, 0, 3.0);
  st.set_gain(1, 1, 0, 5.0);
  NomaPower p{Eigen::MatrixXd::Constant(2, 1, 1.0)};
  EXPECT_NEAR(noma_sum_rate(st, all_on(st), p), std::log(4.0) + std::log(6.0), 1e-14);
}

TEST(Round, TopLWithThreshold) {
  const auto st = cell({1.0, 1.0, 1.0, 1.0});
  NomaAssignment r{Eigen::MatrixXd(4, 1), AssignmentMode::relaxed};
  r.rho << 0.9, 0.7, 0.2, 0.05;
  const auto out = round_assignment(st, r, 3);
  EXPECT_EQ(out.rho(0, 0), 1.0);
  EXPECT_EQ(out.rho(1, 0), 1.0);
  EXPECT_EQ(out.rho(2, 0), 1.0);
  EXPECT_EQ(out.rho(3, 0), 0.0);
}

TEST(Round, BelowThresholdUnassigned) {
  const auto st = cell({1.0, 1.0});
  NomaAssignment r{Eigen::MatrixXd::Constant(2, 1, 0.05), AssignmentMode::relaxed};
  EXPECT_EQ(round_assignment(st, r, 3).rho.sum(), 0.0);
}

TEST(Round, TieGoesToLowerIndex) {
  const auto st = cell({1.0, 1.0});
  NomaAssignment r{Eigen::MatrixXd::Constant(2, 1, 0.5), AssignmentMode::relaxed};
  const auto out = round_assignment(st, r, 1);
  EXPECT_EQ(out.rho(0, 0), 1.0);
  EXPECT_EQ(out.rho(1, 0), 0.0);
}

TEST(ClosedForm, SingleEntry) {
  // alpha = 1, lambda = 0.5, no interference terms: p = 1 / 0.5.
  const auto st = cell({1.0});
  CoeffGrid c = CoeffGrid::high_sinr(1, 1);
  convex::DualState duals({0.5}, 0.1);
  NomaPower cur{Eigen::MatrixXd::Constant(1, 1, 1.0)};
  EXPECT_DOUBLE_EQ(noma_power_closed_form(st, all_on(st), cur, c, duals).p(0, 0), 2.0);
}

TEST(ClosedForm, UnassignedEntryIsZero) {
  const auto st = cell({1.0, 2.0});
  auto rho = all_on(st);
  rho.rho(0, 0) = 0.0;
  CoeffGrid c = CoeffGrid::high_sinr(2, 1);
  convex::DualState duals({0.5}, 0.1);
  NomaPower cur{Eigen::MatrixXd::Constant(2, 1, 1.0)};
  EXPECT_EQ(noma_power_closed_form(st, rho, cur, c, duals).p(0, 0), 0.0);
}

TEST(ClosedForm, ZeroMultiplierClampsToBudget) {
  const auto st = cell({1.0}, 1, 4.0);
  CoeffGrid c = CoeffGrid::high_sinr(1, 1);
  convex::DualState duals({0.0}, 0.1);
  NomaPower cur{Eigen::MatrixXd::Constant(1, 1, 1.0)};
  EXPECT_DOUBLE_EQ(noma_power_closed_form(st, all_on(st), cur, c, duals).p(0, 0), 4.0);
}

TEST(ClosedForm, RejectsNegativeMultiplier) {
  const auto st = cell({1.0});
  CoeffGrid c = CoeffGrid::high_sinr(1, 1);
  NomaPower cur{Eigen::MatrixXd::Constant(1, 1, 1.0)};
  EXPECT_THROW(noma_power_closed_form(st, all_on(st), cur, c, convex::DualState({-1.0}, 0.1)), std::invalid_argument);
}

TEST(AllocatePower, SingleUserTakesBudget) {
  const auto st = cell({1e-6}, 1, 10.0, 1e-12);
  SolverConfig cfg;
  const auto r = allocate_power(st, all_on(st), NomaPower{Eigen::MatrixXd::Constant(1, 1, 1.0)}, cfg);
  EXPECT_NEAR(r.power.p(0, 0), 10.0, 1e-6 * 10.0);
  EXPECT_NEAR(r.sum_rate, std::log1p(1e-6 * 10.0 / 1e-12), 1e-6);
}

TEST(AllocatePower, FeasibleKktAndFixedPoint) {
  SolverConfig cfg;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto st = drop(seed);
    NomaAssignment rho = NomaAssignment::zeros(st, AssignmentMode::binary);
    for (std::size_t m = 0; m < st.num_users(); ++m)
      for (std::size_t n = 0; n < st.num_subcarriers(); ++n)
        if ((m + n) % 2 == 0) rho.rho(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) = 1.0;
    NomaPower init{rho.rho};
    const auto r = allocate_power(st, rho, init, cfg);
    const PowerModel model(st, rho.rho);
    const auto used = consumed_power(model, r.power.p);
    for (std::size_t f = 0; f < st.num_bs(); ++f) EXPECT_LE(used[f], st.p_max(f) * (1.0 + 1e-6));
    EXPECT_GE(r.power.p.minCoeff(), 0.0);

    const auto& last = r.detail.last;
    ASSERT_TRUE(last.converged) << "seed " << seed;
    const auto raw_used = consumed_power(model, last.p);
    for (std::size_t f = 0; f < st.num_bs(); ++f)
      EXPECT_LE(std::abs(last.duals.lambda[f] * (st.p_max(f) - raw_used[f])), 1e-4 * st.p_max(f)) << "seed " << seed;
    const auto again = noma_power_closed_form(st, rho, NomaPower{last.p}, last.coeffs, last.duals, cfg.p_floor);
    for (Eigen::Index k = 0; k < last.p.size(); ++k)
      if (rho.rho.data()[k] > 0.0)
        EXPECT_LE(std::abs(again.p.data()[k] - last.p.data()[k]), 1e-6 * last.p.data()[k]) << "seed " << seed;
  }
}

TEST(AllocatePower, SurrogateTightAtExpansionPoint) {
  const auto st = drop(3);
  const auto rho = all_on(st);
  const PowerModel model(st, rho.rho);
  const Eigen::MatrixXd p = Eigen::MatrixXd::Constant(rho.rho.rows(), rho.rho.cols(), 0.2);
  const Eigen::MatrixXd gamma = model.sinr(p);
  CoeffGrid c = CoeffGrid::high_sinr(gamma.rows(), gamma.cols());
  c.retighten(gamma);
  EXPECT_NEAR(surrogate_objective(model, gamma, c), sum_log1p(gamma), 1e-9);
}

TEST(AllocateSubcarriers, LoneUserFillsSubcarriers) {
  SolverConfig cfg;
  const auto st = cell({1e-6}, 3, 10.0, 1e-12);
  NomaAssignment init{Eigen::MatrixXd::Constant(1, 3, 0.5), AssignmentMode::relaxed};
  NomaPower cand{Eigen::MatrixXd::Constant(1, 3, 10.0 / 3.0)};
  const auto r = allocate_subcarriers(st, cand, init, cfg);
  for (Eigen::Index n = 0; n < 3; ++n) EXPECT_GT(r.relaxed.rho(0, n), 0.99);
}

TEST(Solve, SingleUserUsesEverything) {
  SolverConfig cfg;
  ChannelState st(1, {0}, 4, {10.0}, 1e-12);
  for (std::size_t n = 0; n < 4; ++n) st.set_gain(0, 0, n, 1e-6 * (1.0 + 0.1 * static_cast<double>(n)));
  const auto sol = solve_noma(st, cfg);
  EXPECT_EQ(sol.assignment.rho.sum(), 4.0);
  EXPECT_NEAR(sol.power.p.sum(), 10.0, 1e-6 * 10.0);
}

TEST(Solve, FeasibleOnRandomDrops) {
  SolverConfig cfg;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto st = drop(seed, {3, 2, 2});
    const auto sol = solve_noma(st, cfg);
    EXPECT_GT(sol.sum_rate, 0.0);
    EXPECT_NEAR(sol.sum_rate, noma_sum_rate(st, sol.assignment, sol.power), 1e-9 * sol.sum_rate);
    for (std::size_t f = 0; f < st.num_bs(); ++f) {
      double used = 0.0;
      for (std::size_t m : st.users_of(f)) used += sol.power.p.row(static_cast<Eigen::Index>(m)).sum();
      EXPECT_LE(used, st.p_max(f) * (1.0 + 1e-6));
      for (std::size_t n = 0; n < st.num_subcarriers(); ++n) {
        double load = 0.0;
        for (std::size_t m : st.users_of(f)) load += sol.assignment.rho(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
        EXPECT_LE(load, static_cast<double>(cfg.max_users_per_subcarrier));
      }
    }
    for (Eigen::Index k = 0; k < sol.power.p.size(); ++k)
      if (sol.assignment.rho.data()[k] == 0.0) EXPECT_EQ(sol.power.p.data()[k], 0.0);
    for (std::size_t k = 1; k < sol.best_history.size(); ++k) EXPECT_GE(sol.best_history[k], sol.best_history[k - 1]);
  }
}

TEST(Solve, RejectsShapeMismatch) {
  const auto st = cell({1.0, 2.0});
  NomaAssignment bad{Eigen::MatrixXd::Ones(3, 1), AssignmentMode::binary};
  EXPECT_THROW(noma_sum_rate(st, bad, NomaPower{Eigen::MatrixXd::Ones(3, 1)}), std::invalid_argument);
}
