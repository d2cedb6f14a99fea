#ifndef NOMASCMA_CONVEX_SCALE_HPP
#define NOMASCMA_CONVEX_SCALE_HPP

#include <cmath>
#include <stdexcept>

namespace nomascma::convex {

/// Coefficients of the log-domain tangent minorant
///   alpha * log(z) + beta <= log(1 + z),
/// tight at the expansion point z0.
struct ScaleCoeffs {
  double alpha = 1.0;
  double beta = 0.0;
  double z0 = 0.0;  // 0 marks the high-SINR start (alpha = 1, beta = 0)

  static ScaleCoeffs high_sinr() { return {}; }

  static ScaleCoeffs at(double z0) {
    if (!(z0 > 0.0) || !std::isfinite(z0))
      throw std::invalid_argument("scale_coeffs: expansion point must be positive and finite");
    const double a = z0 / (z0 + 1.0);
    return {a, std::log1p(z0) - a * std::log(z0), z0};
  }

  bool is_high_sinr() const { return z0 == 0.0; }

  double bound(double z) const { return alpha * std::log(z) + beta; }
};

inline ScaleCoeffs scale_coeffs(double z0) { return ScaleCoeffs::at(z0); }

}  // namespace nomascma::convex

#endif  // NOMASCMA_CONVEX_SCALE_HPP
