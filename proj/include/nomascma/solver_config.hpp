#ifndef NOMASCMA_SOLVER_CONFIG_HPP
#define NOMASCMA_SOLVER_CONFIG_HPP

#include <algorithm>
#include <cstddef>
#include <stdexcept>

#include "nomascma/convex/gp.hpp"
#include "nomascma/hetnet.hpp"

namespace nomascma {

/// Tunables shared by the NOMA and SCMA solvers.
struct SolverConfig {
  // Outer alternation stops when ||P(k) - P(k-1)|| <= outer_tol_rel * max_f p_max_f.
  double outer_tol_rel = 1e-4;
  // Dual loop stops when the multipliers move by at most dual_tol and the
  // powers by at most fixed_point_tol (relative).
  double dual_tol = 1e-5;
  double fixed_point_tol = 1e-9;
  // SCALE re-tightening rounds per power allocation.
  std::size_t inner_rounds = 10;
  // Normalized subgradient step; BS f uses step * lambda_f / p_max_f.
  double step = 0.5;
  std::size_t outer_iters = 20;
  // Outer alternation also stops after this many consecutive iterations
  // without a new best sum-rate; 0 disables the rule.
  std::size_t stall_iters = 2;
  std::size_t condense_iters = 10;
  std::size_t dual_iters = 5000;
  double condense_tol = 1e-4;  // relative gain of the relaxed objective

  double rho_floor = 1e-3;   // lower box of relaxed assignments inside the GP
  double p_floor = 1e-12;    // W, keeps closed-form anchors positive
  double round_threshold = 0.1;

  std::size_t max_users_per_subcarrier = 3;  // L_T
  std::size_t max_reuse_per_subcarrier = 6;  // K
  std::size_t codebook_size = 2;             // U

  bool literal_scma_interference = false;
  std::size_t codebook_cap_per_user = 0;        // 0 disables the cap
  std::size_t scma_candidates_per_codebook = 2; // users kept per (cell, codebook) in the GP; 0 keeps all

  // GP settings for the condensed assignment problems.
  convex::GpOptions gp{1e-4, 500, 1.0, 0.1};

  void validate() const {
    if (!(outer_tol_rel > 0.0) || !(dual_tol > 0.0) || !(fixed_point_tol > 0.0) || !(condense_tol > 0.0))
      throw std::invalid_argument("SolverConfig: tolerances must be positive");
    if (!(step > 0.0)) throw std::invalid_argument("SolverConfig: step must be positive");
    if (inner_rounds < 1 || outer_iters < 1 || condense_iters < 1 || dual_iters < 1)
      throw std::invalid_argument("SolverConfig: iteration counts must be >= 1");
    if (max_users_per_subcarrier < 1 || max_reuse_per_subcarrier < 1 || codebook_size < 1)
      throw std::invalid_argument("SolverConfig: L_T, K and U must be >= 1");
    if (!(rho_floor > 0.0 && rho_floor < 0.1)) throw std::invalid_argument("SolverConfig: rho_floor must be in (0, 0.1)");
    if (!(p_floor > 0.0)) throw std::invalid_argument("SolverConfig: p_floor must be positive");
    if (!(round_threshold > 0.0 && round_threshold <= 1.0))
      throw std::invalid_argument("SolverConfig: round_threshold must be in (0, 1]");
  }

  double outer_tol_w(const ChannelState& state) const {
    return outer_tol_rel * *std::max_element(state.p_max().begin(), state.p_max().end());
  }
};

}  // namespace nomascma

#endif  // NOMASCMA_SOLVER_CONFIG_HPP
