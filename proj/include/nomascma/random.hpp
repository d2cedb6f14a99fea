#ifndef NOMASCMA_RANDOM_HPP
#define NOMASCMA_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <vector>

namespace nomascma {

/// Seeded random source that hands out independent keyed substreams.
///
/// Every entity in a scenario (a base station, a user, a fading block) draws
/// from its own substream keyed by stable identifiers, so adding users or cells
/// to a scenario never perturbs the draws of the entities already present.
class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::mt19937_64 substream(std::initializer_list<std::uint64_t> keys) const {
    std::vector<std::uint32_t> words;
    words.reserve(2 * (keys.size() + 1));
    auto push = [&words](std::uint64_t v) {
      words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
      words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push(seed_);
    for (auto k : keys) push(k);
    std::seed_seq seq(words.begin(), words.end());
    return std::mt19937_64(seq);
  }

private:
  std::uint64_t seed_;
};

// Distribution helpers are written out by hand so draws are identical across
// standard library implementations.

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Unit-mean exponential draw, i.e. |x|^2 for unit-power Rayleigh fading.
inline double unit_exponential(std::mt19937_64& g) {
  return -std::log1p(-uniform01(g));
}

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// Uniform point in the disk of `radius` around `center`.
inline Point uniform_in_disk(std::mt19937_64& g, const Point& center, double radius) {
  const double r = radius * std::sqrt(uniform01(g));
  const double phi = 2.0 * std::numbers::pi * uniform01(g);
  return {center.x + r * std::cos(phi), center.y + r * std::sin(phi)};
}

}  // namespace nomascma

#endif  // NOMASCMA_RANDOM_HPP
