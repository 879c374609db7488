#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "rmtlab/common.hpp"

namespace rmt {

struct QuadratureRule {
  std::vector<Real> nodes;
  std::vector<Real> weights;
};

// Gauss-Legendre nodes on [-1,1] by Newton iteration on P_n.
inline QuadratureRule gauss_legendre(long n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  QuadratureRule r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  const Real pi = 3.14159265358979323846264338327950288L;
  for (long i = 0; i < (n + 1) / 2; ++i) {
    Real x = std::cos(pi * (static_cast<Real>(i) + 0.75L) / (static_cast<Real>(n) + 0.5L));
    Real dp = 0.0L;
    for (int it = 0; it < 100; ++it) {
      Real p0 = 1.0L, p1 = x;
      for (long j = 2; j <= n; ++j) {
        Real p2 = ((2.0L * j - 1.0L) * x * p1 - (j - 1.0L) * p0) / static_cast<Real>(j);
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<Real>(n) * (x * p1 - p0) / (x * x - 1.0L);
      Real dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-19L) break;
    }
    Real w = 2.0L / ((1.0L - x * x) * dp * dp);
    r.nodes[static_cast<std::size_t>(i)] = -x;
    r.weights[static_cast<std::size_t>(i)] = w;
    r.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    r.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) r.nodes[static_cast<std::size_t>(n / 2)] = 0.0L;
  return r;
}

// the rule mapped onto [a,b]
inline QuadratureRule gauss_legendre_on(long n, Real a, Real b) {
  QuadratureRule base = gauss_legendre(n);
  QuadratureRule r;
  r.nodes.reserve(base.nodes.size());
  r.weights.reserve(base.nodes.size());
  Real mid = 0.5L * (a + b), half = 0.5L * (b - a);
  for (std::size_t i = 0; i < base.nodes.size(); ++i) {
    r.nodes.push_back(mid + half * base.nodes[i]);
    r.weights.push_back(half * base.weights[i]);
  }
  return r;
}

template <typename F>
Real integrate_gl(const F& f, Real a, Real b, long n) {
  QuadratureRule r = gauss_legendre_on(n, a, b);
  Real s = 0.0L;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(r.nodes[i]);
  return s;
}

// doubling until two consecutive refinements agree
template <typename F>
Real integrate_adaptive(const F& f, Real a, Real b, Real tol = 1e-13L, long n0 = 32,
                        long cap = 4096) {
  Real prev = integrate_gl(f, a, b, n0);
  for (long n = 2 * n0; n <= cap; n *= 2) {
    Real cur = integrate_gl(f, a, b, n);
    if (std::fabs(cur - prev) <= tol * std::max<Real>(1.0L, std::fabs(cur))) return cur;
    prev = cur;
  }
  throw numeric_error("integrate_adaptive: quadrature did not converge");
}

// Closed intervals, possibly with infinite endpoints before clipping.
struct IntervalList {
  std::vector<std::pair<Real, Real>> parts;

  static IntervalList normalized(std::vector<std::pair<Real, Real>> raw) {
    std::vector<std::pair<Real, Real>> v;
    for (auto& iv : raw)
      if (iv.first < iv.second) v.push_back(iv);
    std::sort(v.begin(), v.end());
    IntervalList out;
    for (auto& iv : v) {
      if (!out.parts.empty() && iv.first <= out.parts.back().second)
        out.parts.back().second = std::max(out.parts.back().second, iv.second);
      else
        out.parts.push_back(iv);
    }
    return out;
  }

  // complement within [lo,hi]
  IntervalList complement(Real lo, Real hi) const {
    IntervalList out;
    Real cursor = lo;
    for (const auto& iv : parts) {
      Real a = std::max(iv.first, lo), b = std::min(iv.second, hi);
      if (a >= hi || b <= lo) continue;
      if (a > cursor) out.parts.push_back({cursor, a});
      cursor = std::max(cursor, b);
    }
    if (cursor < hi) out.parts.push_back({cursor, hi});
    return out;
  }

  IntervalList clipped(Real lo, Real hi) const {
    IntervalList out;
    for (const auto& iv : parts) {
      Real a = std::max(iv.first, lo), b = std::min(iv.second, hi);
      if (a < b) out.parts.push_back({a, b});
    }
    return out;
  }

  bool empty() const { return parts.empty(); }
};

}  // namespace rmt
