#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

#include "rmtlab/common.hpp"

namespace rmt {

// Names one reproducible sample stream. Identical (seed, stream) pairs give
// bit-identical draw sequences; distinct streams are independent by the
// counter construction in docs/rng.md, which this header implements verbatim.
struct RngConfig {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

namespace detail {

inline constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ull;

inline constexpr std::uint64_t sm64_mix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

}  // namespace detail

class CounterRng {
 public:
  explicit CounterRng(RngConfig c)
      : state_(detail::sm64_mix(detail::sm64_mix(c.seed) + c.stream * detail::kWeyl)) {}

  std::uint64_t next_u64() {
    state_ += detail::kWeyl;
    return detail::sm64_mix(state_);
  }

  // [0,1) and (0,1], both on the 2^-53 grid
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  // uniform on {0,...,n-1}, modulo bias removed by rejection
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("CounterRng::below: n must be positive");
    for (;;) {
      std::uint64_t v = next_u64();
      std::uint64_t r = v % n;
      if (v - r <= std::uint64_t(0) - n) return r;
    }
  }

  // Box-Muller; consumes exactly two words per pair
  std::pair<double, double> normal_pair() {
    double u1 = uniform_pos();
    double u2 = uniform01();
    double rad = std::sqrt(-2.0 * std::log(u1));
    double ang = 2.0 * 3.14159265358979323846 * u2;
    return {rad * std::cos(ang), rad * std::sin(ang)};
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    auto [a, b] = normal_pair();
    spare_ = b;
    have_spare_ = true;
    return a;
  }

  // P(k) = (1-xi) xi^k by inversion, stable for xi near 1
  long geometric(double xi) {
    if (!(xi > 0.0 && xi < 1.0))
      throw std::invalid_argument("CounterRng::geometric: xi must lie in (0,1)");
    return static_cast<long>(std::floor(std::log(uniform_pos()) / std::log(xi)));
  }

  double exponential() { return -std::log(uniform_pos()); }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace rmt
