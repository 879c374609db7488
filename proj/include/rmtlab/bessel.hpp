#pragma once

#include <cmath>
#include <vector>

#include "rmtlab/common.hpp"

namespace rmt {

// J_0(x)..J_{n_max}(x) by downward (Miller) recurrence, normalized with
// J_0 + 2*sum J_{2k} = 1. Accurate to roughly machine precision for the
// moderate arguments used here.
inline std::vector<Real> bessel_j_table(Real x, long n_max) {
  std::vector<Real> out(static_cast<std::size_t>(n_max) + 1, 0.0L);
  if (x == 0.0L) {
    out[0] = 1.0L;
    return out;
  }
  long start = n_max + static_cast<long>(std::ceil(std::fabs(x))) + 60;
  Real jp = 0.0L;   // J_{k+1}
  Real j = 1e-300L; // J_k, seeded at k = start
  Real norm = 0.0L;
  for (long k = start; k >= 0; --k) {
    if (k <= n_max) out[static_cast<std::size_t>(k)] = j;
    if (k == 0) {
      norm += j;
      break;
    }
    if (k % 2 == 0) norm += 2.0L * j;
    Real jm = (2.0L * static_cast<Real>(k) / x) * j - jp;
    jp = j;
    j = jm;
    if (std::fabs(j) > 1e280L) {
      j *= 1e-280L;
      jp *= 1e-280L;
      norm *= 1e-280L;
      for (auto& v : out) v *= 1e-280L;
    }
  }
  for (auto& v : out) v /= norm;
  return out;
}

// classical envelope |J_n(x)| <= (x/2)^n / n!
inline Real bessel_j_envelope(Real x, long n) {
  Real logv = static_cast<Real>(n) * std::log(std::fabs(x) / 2.0L) -
              std::lgamma(static_cast<Real>(n) + 1.0L);
  return std::exp(logv);
}

}  // namespace rmt
