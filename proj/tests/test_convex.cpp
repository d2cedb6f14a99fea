#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "nomascma/convex/agma.hpp"
#include "nomascma/convex/dual.hpp"
#include "nomascma/convex/gp.hpp"
#include "nomascma/convex/scale.hpp"

using namespace nomascma::convex;

namespace {

Monomial mono(double c, std::vector<std::pair<std::size_t, double>> p) { return Monomial{c, std::move(p)}; }

}  // namespace

TEST(Scale, UnitExpansionPoint) {
  const auto s = scale_coeffs(1.0);
  EXPECT_DOUBLE_EQ(s.alpha, 0.5);
  EXPECT_NEAR(s.beta, std::log(2.0), 1e-15);
}

TEST(Scale, HighSinrSentinel) {
  const auto s = ScaleCoeffs::high_sinr();
  EXPECT_EQ(s.alpha, 1.0);
  EXPECT_EQ(s.beta, 0.0);
  EXPECT_TRUE(s.is_high_sinr());
}

TEST(Scale, TightAtExpansionPoint) {
  const auto s = scale_coeffs(3.0);
  EXPECT_NEAR(s.bound(3.0), std::log(4.0), 1e-15);
}

TEST(Scale, RejectsNonPositive) {
  EXPECT_THROW(scale_coeffs(0.0), std::invalid_argument);
  EXPECT_THROW(scale_coeffs(-1.0), std::invalid_argument);
  EXPECT_THROW(scale_coeffs(INFINITY), std::invalid_argument);
}

TEST(Scale, MinorantProperty) {
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> u(std::log(1e-3), std::log(1e3));
  for (int i = 0; i < 200; ++i) {
    const double z0 = std::exp(u(g));
    const double z = std::exp(u(g));
    const auto s = scale_coeffs(z0);
    EXPECT_LE(s.bound(z), std::log1p(z) + 1e-12);
    EXPECT_NEAR(s.bound(z0), std::log1p(z0), 1e-12);
    EXPECT_GE(s.alpha, 0.0);
    EXPECT_LT(s.alpha, 1.0);
  }
}

TEST(Agma, EqualityAtAnchor) {
  const std::vector<double> t{1.0, 3.0};
  const auto r = agma_condense(t, t);
  EXPECT_DOUBLE_EQ(r.weights[0], 0.25);
  EXPECT_DOUBLE_EQ(r.weights[1], 0.75);
  EXPECT_NEAR(r.bound, 4.0, 1e-12);
}

TEST(Agma, StrictBelowSumAwayFromAnchor) {
  // (2/0.25)^0.25 * (2/0.75)^0.75 evaluated independently.
  const double expected = std::pow(8.0, 0.25) * std::pow(8.0 / 3.0, 0.75);
  const auto r = agma_condense(std::vector<double>{2.0, 2.0}, std::vector<double>{1.0, 3.0});
  EXPECT_NEAR(r.bound, expected, 1e-12);
  EXPECT_NEAR(r.bound, 3.509, 1e-3);
  EXPECT_LT(r.bound, 4.0);
}

TEST(Agma, SingleTerm) {
  const auto r = agma_condense(std::vector<double>{5.0}, std::vector<double>{7.0});
  EXPECT_DOUBLE_EQ(r.weights[0], 1.0);
  EXPECT_DOUBLE_EQ(r.bound, 5.0);
}

TEST(Agma, RejectsBadInput) {
  EXPECT_THROW(agma_condense(std::vector<double>{1.0, 0.0}, std::vector<double>{1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(agma_condense(std::vector<double>{1.0}, std::vector<double>{1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(agma_condense(std::vector<double>{}, std::vector<double>{}), std::invalid_argument);
}

TEST(Agma, CondensedMonomialIsTightLowerBound) {
  Posynomial p{{mono(2.0, {{0, 1.0}}), mono(3.0, {{1, 1.0}, {0, -0.5}}), mono(0.5, {})}};
  const std::vector<double> anchor{1.5, 0.7};
  const auto m = condense(p, anchor);
  EXPECT_NEAR(m.eval(anchor), p.eval(anchor), 1e-12);
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u(0.01, 10.0);
  for (int i = 0; i < 100; ++i) {
    const std::vector<double> x{u(g), u(g)};
    EXPECT_LE(m.eval(x), p.eval(x) * (1 + 1e-12));
  }
}

TEST(Gp, ActiveLowerBoundFromConstraint) {
  GpProblem p;
  p.num_vars = 1;
  p.lower = {1e-3};
  p.upper = {1e3};
  p.objective = {Posynomial{{mono(1.0, {{0, 1.0}})}}};
  p.constraints = {Posynomial{{mono(1.0, {{0, -1.0}})}}};
  const auto r = solve_gp(p, std::vector<double>{5.0});
  ASSERT_EQ(r.status, GpStatus::converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-5);
}

TEST(Gp, SymmetricAmGm) {
  GpProblem p;
  p.num_vars = 2;
  p.lower = {1e-3, 1e-3};
  p.upper = {1e3, 1e3};
  p.objective = {Posynomial{{mono(1.0, {{0, 1.0}}), mono(1.0, {{1, 1.0}})}}};
  p.constraints = {Posynomial{{mono(1.0, {{0, -1.0}, {1, -1.0}})}}};
  const auto r = solve_gp(p, std::vector<double>{3.0, 4.0});
  ASSERT_EQ(r.status, GpStatus::converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-4);
  EXPECT_NEAR(r.x[1], 1.0, 1e-4);
  EXPECT_NEAR(r.objective, 2.0, 1e-5);
}

TEST(Gp, SqrtObjective) {
  // min 2 sqrt(x) s.t. 4/x <= 1: the objective is increasing, so x* = 4, value 4.
  GpProblem p;
  p.num_vars = 1;
  p.lower = {1e-3};
  p.upper = {1e3};
  p.objective = {Posynomial{{mono(2.0, {{0, 0.5}})}}};
  p.constraints = {Posynomial{{mono(4.0, {{0, -1.0}})}}};
  const auto r = solve_gp(p, std::vector<double>{1.0});  // infeasible start exercises phase 1
  ASSERT_EQ(r.status, GpStatus::converged);
  EXPECT_NEAR(r.x[0], 4.0, 1e-4);
  EXPECT_NEAR(r.objective, 4.0, 1e-4);
}

TEST(Gp, DetectsInfeasibility) {
  GpProblem p;
  p.num_vars = 1;
  p.lower = {1e-3};
  p.upper = {1.0};
  p.objective = {Posynomial{{mono(1.0, {{0, 1.0}})}}};
  p.constraints = {Posynomial{{mono(4.0, {{0, -1.0}})}}};  // x >= 4 with x <= 1
  const auto r = solve_gp(p);
  EXPECT_EQ(r.status, GpStatus::infeasible);
  EXPECT_FALSE(r.ok());
}

TEST(Gp, RejectsMalformedProblem) {
  GpProblem p;
  p.num_vars = 1;
  p.lower = {0.0};
  p.upper = {1.0};
  p.objective = {Posynomial{{mono(1.0, {{0, 1.0}})}}};
  EXPECT_THROW(solve_gp(p), std::invalid_argument);
  p.lower = {0.1};
  p.objective = {Posynomial{{mono(-1.0, {{0, 1.0}})}}};
  EXPECT_THROW(solve_gp(p), std::invalid_argument);
}

TEST(Gp, BeatsRandomFeasiblePoints) {
  // Random small GPs: solution feasible and no worse than 1000 random feasible samples.
  std::mt19937_64 g(11);
  std::uniform_real_distribution<double> coef(0.2, 3.0), expo(-1.5, 1.5), logx(std::log(0.1), std::log(10.0));
  for (int trial = 0; trial < 20; ++trial) {
    GpProblem p;
    p.num_vars = 3;
    p.lower.assign(3, 0.1);
    p.upper.assign(3, 10.0);
    auto rand_posy = [&](int terms) {
      Posynomial q;
      for (int t = 0; t < terms; ++t) q.terms.push_back(mono(coef(g), {{0, expo(g)}, {1, expo(g)}, {2, expo(g)}}));
      return q;
    };
    p.objective = {rand_posy(3), rand_posy(2)};
    // Constraint scaled so x = 1 is strictly feasible.
    Posynomial c = rand_posy(2);
    const double at_one = c.eval(std::vector<double>{1, 1, 1});
    for (auto& t : c.terms) t.coeff /= 2.0 * at_one;
    p.constraints = {c};
    const auto r = solve_gp(p, std::vector<double>{1, 1, 1});
    ASSERT_TRUE(r.ok());
    EXPECT_LE(p.max_constraint(r.x), 1.0 + 1e-6);
    for (int s = 0; s < 1000; ++s) {
      const std::vector<double> x{std::exp(logx(g)), std::exp(logx(g)), std::exp(logx(g))};
      if (p.max_constraint(x) > 1.0) continue;
      EXPECT_LE(r.objective, p.objective_value(x) * (1 + 1e-6));
    }
  }
}

TEST(Dual, Step) {
  DualState s({1.0}, 0.1);
  const auto t = subgradient_update(s, std::vector<double>{2.0});
  EXPECT_NEAR(t.lambda[0], 0.8, 1e-15);
  EXPECT_EQ(t.iteration, 1u);
}

TEST(Dual, ProjectionClampsAtZero) {
  DualState s({0.1}, 1.0);
  EXPECT_EQ(subgradient_update(s, std::vector<double>{2.0}).lambda[0], 0.0);
}

TEST(Dual, ZeroResidualKeepsMultiplier) {
  DualState s({0.7, 2.0}, 0.3);
  const auto t = subgradient_update(s, std::vector<double>{0.0, 0.0});
  EXPECT_EQ(t.lambda, s.lambda);
}

TEST(Dual, NeverNegative) {
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  DualState s({1.0, 0.0, 3.0}, 0.5);
  for (int i = 0; i < 500; ++i) {
    s = subgradient_update(s, std::vector<double>{u(g), u(g), u(g)});
    for (double l : s.lambda) EXPECT_GE(l, 0.0);
  }
}

TEST(Dual, RejectsNonPositiveStep) {
  DualState s({1.0}, 0.0);
  EXPECT_THROW(subgradient_update(s, std::vector<double>{1.0}), std::invalid_argument);
}
