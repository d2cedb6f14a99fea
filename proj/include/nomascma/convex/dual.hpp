#ifndef NOMASCMA_CONVEX_DUAL_HPP
#define NOMASCMA_CONVEX_DUAL_HPP

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace nomascma::convex {

/// Lagrange multipliers of the per-BS power budgets, one projected
/// subgradient step size per BS, and the iteration counter.
struct DualState {
  std::vector<double> lambda;
  std::vector<double> step;
  std::size_t iteration = 0;

  DualState() = default;
  DualState(std::vector<double> lambda0, double step0)
      : lambda(std::move(lambda0)), step(lambda.size(), step0) {}
};

/// lambda_f <- [lambda_f - step_f * residual_f]^+ with
/// residual_f = p_max_f - (power consumed by BS f).
inline DualState subgradient_update(DualState state, std::span<const double> residual_per_bs) {
  if (residual_per_bs.size() != state.lambda.size() || state.step.size() != state.lambda.size())
    throw std::invalid_argument("subgradient_update: dimension mismatch");
  for (std::size_t f = 0; f < state.lambda.size(); ++f) {
    if (!(state.step[f] > 0.0)) throw std::invalid_argument("subgradient_update: step must be positive");
    state.lambda[f] = std::max(0.0, state.lambda[f] - state.step[f] * residual_per_bs[f]);
  }
  ++state.iteration;
  return state;
}

}  // namespace nomascma::convex

#endif  // NOMASCMA_CONVEX_DUAL_HPP
