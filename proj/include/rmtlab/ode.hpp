#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "rmtlab/common.hpp"

namespace rmt {

struct OdeOptions {
  Real rel_tol = 1e-12L;
  Real abs_tol = 1e-12L;
  Real max_abs = 1e12L;
  long max_steps = 4000000;
};

// Cash-Karp embedded 4(5) pair with proportional step control. Integrates
// in either direction and lands exactly on x_end.
template <std::size_t N, typename F>
void ode_integrate(F&& rhs, Real& x, std::array<Real, N>& y, Real x_end,
                   const OdeOptions& opt = OdeOptions()) {
  if (x == x_end) return;
  const Real a21 = 1.0L / 5.0L;
  const Real a31 = 3.0L / 40.0L, a32 = 9.0L / 40.0L;
  const Real a41 = 3.0L / 10.0L, a42 = -9.0L / 10.0L, a43 = 6.0L / 5.0L;
  const Real a51 = -11.0L / 54.0L, a52 = 5.0L / 2.0L, a53 = -70.0L / 27.0L, a54 = 35.0L / 27.0L;
  const Real a61 = 1631.0L / 55296.0L, a62 = 175.0L / 512.0L, a63 = 575.0L / 13824.0L,
             a64 = 44275.0L / 110592.0L, a65 = 253.0L / 4096.0L;
  const Real c2 = 1.0L / 5.0L, c3 = 3.0L / 10.0L, c4 = 3.0L / 5.0L, c5 = 1.0L, c6 = 7.0L / 8.0L;
  const Real b1 = 37.0L / 378.0L, b3 = 250.0L / 621.0L, b4 = 125.0L / 594.0L,
             b6 = 512.0L / 1771.0L;
  const Real e1 = b1 - 2825.0L / 27648.0L, e3 = b3 - 18575.0L / 48384.0L,
             e4 = b4 - 13525.0L / 55296.0L, e5 = -277.0L / 14336.0L, e6 = b6 - 1.0L / 4.0L;

  Real dir = (x_end > x) ? 1.0L : -1.0L;
  Real h = dir * std::min(1e-3L, std::fabs(x_end - x));
  std::array<Real, N> k1, k2, k3, k4, k5, k6, yt, y5;
  for (long step = 0; step < opt.max_steps; ++step) {
    bool final_step = std::fabs(h) >= std::fabs(x_end - x);
    if (final_step) h = x_end - x;
    rhs(x, y, k1);
    for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * a21 * k1[i];
    rhs(x + c2 * h, yt, k2);
    for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(x + c3 * h, yt, k3);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(x + c4 * h, yt, k4);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(x + c5 * h, yt, k5);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    rhs(x + c6 * h, yt, k6);
    Real err = 0.0L;
    for (std::size_t i = 0; i < N; ++i) {
      y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b6 * k6[i]);
      Real ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i]);
      Real scale = opt.abs_tol + opt.rel_tol * std::max(std::fabs(y[i]), std::fabs(y5[i]));
      err = std::max(err, std::fabs(ei) / scale);
    }
    if (err <= 1.0L) {
      x = final_step ? x_end : x + h;
      y = y5;
      for (Real v : y)
        if (!(std::fabs(v) <= opt.max_abs)) throw numeric_error("ode_integrate: solution escaped bounds");
      if (final_step) return;
      h *= (err > 1e-10L) ? std::min(5.0L, 0.9L * std::pow(err, -0.2L)) : 5.0L;
    } else {
      h *= std::max(0.1L, 0.9L * std::pow(err, -0.25L));
      if (!(std::fabs(h) > 1e-15L * std::max(1.0L, std::fabs(x))))
        throw numeric_error("ode_integrate: step size collapsed");
    }
  }
  throw numeric_error("ode_integrate: exceeded step budget");
}

}  // namespace rmt
