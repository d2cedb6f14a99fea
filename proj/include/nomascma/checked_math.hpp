#ifndef NOMASCMA_CHECKED_MATH_HPP
#define NOMASCMA_CHECKED_MATH_HPP

#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace nomascma {

/// a * b, throwing std::overflow_error instead of wrapping.
inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("operation count exceeds 64 bits");
  return r;
}

inline std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("operation count exceeds 64 bits");
  return r;
}

inline std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) r = checked_mul(r, base);
  return r;
}

/// C(n, k) with exact intermediate division.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // r * (n - k + i) is divisible by i; split the gcd out to delay overflow.
    const std::uint64_t num = n - k + i;
    std::uint64_t a = r, b = num, d = i;
    std::uint64_t g = std::gcd(a, d);
    a /= g;
    d /= g;
    b /= d;
    r = checked_mul(a, b);
  }
  return r;
}

}  // namespace nomascma

#endif  // NOMASCMA_CHECKED_MATH_HPP
