#ifndef NOMASCMA_CONVEX_AGMA_HPP
#define NOMASCMA_CONVEX_AGMA_HPP

#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace nomascma::convex {

struct AgmaResult {
  std::vector<double> weights;
  double bound = 0.0;
};

/// Weighted arithmetic-geometric mean bound of sum(terms) around `anchor`:
/// u_i = anchor_i / sum(anchor), bound = prod (terms_i / u_i)^u_i <= sum(terms).
inline AgmaResult agma_condense(std::span<const double> terms, std::span<const double> anchor) {
  if (terms.empty() || terms.size() != anchor.size())
    throw std::invalid_argument("agma_condense: terms and anchor must have the same nonzero length");
  for (std::size_t i = 0; i < terms.size(); ++i)
    if (!(terms[i] > 0.0) || !(anchor[i] > 0.0))
      throw std::invalid_argument("agma_condense: entries must be positive");

  const double total = std::accumulate(anchor.begin(), anchor.end(), 0.0);
  AgmaResult out;
  out.weights.reserve(anchor.size());
  double log_bound = 0.0;
  for (std::size_t i = 0; i < anchor.size(); ++i) {
    const double u = anchor[i] / total;
    out.weights.push_back(u);
    log_bound += u * (std::log(terms[i]) - std::log(u));
  }
  out.bound = std::exp(log_bound);
  return out;
}

}  // namespace nomascma::convex

#endif  // NOMASCMA_CONVEX_AGMA_HPP
