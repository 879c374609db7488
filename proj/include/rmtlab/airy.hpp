#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rmtlab/common.hpp"

namespace rmt {

struct AiryValues {
  Real x = 0.0L;
  Real a = 0.0L;
  Real ap = 0.0L;
};

namespace detail {

inline constexpr Real kAiryPi = 3.141592653589793238462643383279502884L;

// values at the origin, from the gamma function
inline Real airy_f0() {
  static const Real v = std::pow(3.0L, -2.0L / 3.0L) / std::tgamma(2.0L / 3.0L);
  return v;
}
inline Real airy_g0() {
  static const Real v = std::pow(3.0L, -1.0L / 3.0L) / std::tgamma(1.0L / 3.0L);
  return v;
}

// Both power-series branches carry roughly e^(2/3 |x|^(3/2)) * eps of rounding
// while the divergent expansions bottom out near e^(-4/3 |x|^(3/2)); 6.8 keeps
// either side of the handover below 1e-11.
inline constexpr Real kAirySwitch = 6.8L;

inline AiryValues airy_maclaurin(Real x) {
  Real x3 = x * x * x;
  Real f = 1.0L, g = x, fp = 0.5L * x * x, gp = 1.0L;
  Real tf = 1.0L, tg = x, tfp = fp, tgp = 1.0L;
  for (long k = 0; k < 400; ++k) {
    Real k3 = 3.0L * static_cast<Real>(k);
    tf *= x3 / ((k3 + 2.0L) * (k3 + 3.0L));
    tg *= x3 / ((k3 + 3.0L) * (k3 + 4.0L));
    tgp *= x3 / ((k3 + 1.0L) * (k3 + 3.0L));
    tfp *= x3 / ((k3 + 3.0L) * (k3 + 5.0L));
    f += tf;
    g += tg;
    gp += tgp;
    fp += tfp;
    Real biggest = std::max(std::max(std::fabs(tf), std::fabs(tg)),
                            std::max(std::fabs(tfp), std::fabs(tgp)));
    if (biggest < 1e-24L * (1.0L + std::fabs(f) + std::fabs(g))) break;
  }
  AiryValues v;
  v.x = x;
  v.a = airy_f0() * f - airy_g0() * g;
  v.ap = airy_f0() * fp - airy_g0() * gp;
  return v;
}

inline AiryValues airy_asymptotic_pos(Real x) {
  Real zeta = (2.0L / 3.0L) * std::pow(x, 1.5L);
  Real t = 1.0L, sa = 1.0L, sap = 1.0L;
  Real last = std::numeric_limits<Real>::max();
  for (long k = 1; k <= 80; ++k) {
    t *= static_cast<Real>(6 * k - 5) * static_cast<Real>(6 * k - 1) /
         (72.0L * static_cast<Real>(k) * zeta);
    if (std::fabs(t) >= last) break;
    last = std::fabs(t);
    Real sgn = (k % 2 == 0) ? 1.0L : -1.0L;
    sa += sgn * t;
    sap += sgn * t * static_cast<Real>(6 * k + 1) / static_cast<Real>(1 - 6 * k);
    if (std::fabs(t) < 1e-22L) break;
  }
  Real root4 = std::pow(x, 0.25L);
  Real pre = std::exp(-zeta) / (2.0L * std::sqrt(kAiryPi));
  AiryValues v;
  v.x = x;
  v.a = pre * sa / root4;
  v.ap = -pre * sap * root4;
  return v;
}

inline AiryValues airy_asymptotic_neg(Real x) {
  Real z = -x;
  Real zeta = (2.0L / 3.0L) * std::pow(z, 1.5L);
  Real pa = 1.0L, qa = 0.0L, pv = 1.0L, qv = 0.0L;
  Real t = 1.0L;
  Real last = std::numeric_limits<Real>::max();
  for (long k = 1; k <= 80; ++k) {
    t *= static_cast<Real>(6 * k - 5) * static_cast<Real>(6 * k - 1) /
         (72.0L * static_cast<Real>(k) * zeta);
    if (std::fabs(t) >= last) break;
    last = std::fabs(t);
    Real vt = t * static_cast<Real>(6 * k + 1) / static_cast<Real>(1 - 6 * k);
    Real sgn = ((k / 2) % 2 == 0) ? 1.0L : -1.0L;
    if (k % 2 == 1) {
      qa += sgn * t;
      qv += sgn * vt;
    } else {
      pa += sgn * t;
      pv += sgn * vt;
    }
    if (std::fabs(t) < 1e-22L) break;
  }
  Real root4 = std::pow(z, 0.25L);
  Real c = std::cos(zeta - kAiryPi / 4.0L), s = std::sin(zeta - kAiryPi / 4.0L);
  AiryValues v;
  v.x = x;
  v.a = (c * pa + s * qa) / (std::sqrt(kAiryPi) * root4);
  v.ap = root4 / std::sqrt(kAiryPi) * (s * pv - c * qv);
  return v;
}

inline AiryValues airy_raw(Real x) {
  if (std::fabs(x) <= kAirySwitch) return airy_maclaurin(x);
  return x > 0.0L ? airy_asymptotic_pos(x) : airy_asymptotic_neg(x);
}

}  // namespace detail

inline AiryValues airy(Real x) {
  if (!(x >= -30.0L && x <= 30.0L))
    throw std::invalid_argument("airy: argument outside [-30, 30]");
  return detail::airy_raw(x);
}

inline Real airy_kernel(Real x, Real y) {
  if (std::fabs(x - y) < 1e-6L) {
    Real m = 0.5L * (x + y);
    AiryValues v = detail::airy_raw(m);
    return v.ap * v.ap - m * v.a * v.a;
  }
  AiryValues vx = detail::airy_raw(x), vy = detail::airy_raw(y);
  return (vx.a * vy.ap - vx.ap * vy.a) / (x - y);
}

}  // namespace rmt
