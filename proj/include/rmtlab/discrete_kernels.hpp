#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmtlab/bessel.hpp"
#include "rmtlab/common.hpp"
#include "rmtlab/toeplitz.hpp"

namespace rmt {

// A symmetric kernel on the nonnegative integers with a computable bound on
// the diagonal tail sum_{i>=s} K(i,i).
struct DiscreteKernel {
  std::function<Real(long, long)> eval;
  std::function<Real(long)> tail_bound;
};

// Kernel of the Poissonized shape-measure edge: both the difference form and
// the shifted-product sum are evaluated and must agree off the diagonal.
inline DiscreteKernel bessel_kernel(Real xi) {
  if (!(xi > 0.0L)) throw std::invalid_argument("bessel_kernel: xi must be > 0");
  Real x = 2.0L * std::sqrt(xi);
  // resolve the table once, generously beyond where the envelope dies
  long n_max = 64;
  while (bessel_j_envelope(x, n_max) > 1e-40L && n_max < (1L << 15)) n_max *= 2;
  auto table = std::make_shared<const std::vector<Real>>(bessel_j_table(x, n_max + 1));

  auto jval = [table](long n) -> Real {
    if (n < 0) return (n % 2 == 0) ? (*table)[static_cast<std::size_t>(-n)]
                                   : -(*table)[static_cast<std::size_t>(-n)];
    if (n >= static_cast<long>(table->size())) return 0.0L;
    return (*table)[static_cast<std::size_t>(n)];
  };

  DiscreteKernel k;
  k.eval = [jval, x, n_max](long a, long b) -> Real {
    Real sum = 0.0L;
    for (long m = 1; a + m <= n_max + 1 && b + m <= n_max + 1; ++m)
      sum += jval(a + m) * jval(b + m);
    if (a != b) {
      Real cd = (x / 2.0L) * (jval(a) * jval(b + 1) - jval(a + 1) * jval(b)) /
                static_cast<Real>(a - b);
      if (std::fabs(cd - sum) > 1e-10L)
        throw numeric_error("bessel_kernel: difference and sum forms disagree");
    }
    return sum;
  };
  k.tail_bound = [x](long s) -> Real {
    Real total = 0.0L;
    for (long j = std::max(s + 1, 1L); j < s + 400; ++j) {
      Real e = bessel_j_envelope(x, j);
      Real term = static_cast<Real>(j) * e * e;
      total += term;
      if (term < 1e-25L * (total + 1e-300L)) break;
    }
    return total;
  };
  return k;
}

// det(I - K) on indices [s, s+N) with N from the tail bound, re-evaluated at
// 2N as a stability check.
inline Real discrete_fredholm_det(const DiscreteKernel& k, long s,
                                  DetDiagnostics* diag = nullptr) {
  Real t0 = k.tail_bound(s);
  if (!std::isfinite(t0)) throw numeric_error("discrete_fredholm_det: divergent tail bound");
  long n = 4;
  while (k.tail_bound(s + n) >= 1e-12L) {
    n *= 2;
    if (n > (1L << 15)) throw numeric_error("discrete_fredholm_det: tail does not close");
  }
  auto det_at = [&](long size) -> Real {
    std::vector<std::vector<Real>> a(static_cast<std::size_t>(size),
                                     std::vector<Real>(static_cast<std::size_t>(size)));
    for (long i = 0; i < size; ++i)
      for (long j = 0; j < size; ++j)
        a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            (i == j ? 1.0L : 0.0L) - k.eval(s + i, s + j);
    Real det = 1.0L;
    for (long c = 0; c < size; ++c) {
      long piv = c;
      for (long r = c + 1; r < size; ++r)
        if (std::fabs(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]) >
            std::fabs(a[static_cast<std::size_t>(piv)][static_cast<std::size_t>(c)]))
          piv = r;
      if (piv != c) {
        std::swap(a[static_cast<std::size_t>(piv)], a[static_cast<std::size_t>(c)]);
        det = -det;
      }
      Real d = a[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
      det *= d;
      if (d == 0.0L) break;
      for (long r = c + 1; r < size; ++r) {
        Real f = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] / d;
        if (f == 0.0L) continue;
        for (long cc = c; cc < size; ++cc)
          a[static_cast<std::size_t>(r)][static_cast<std::size_t>(cc)] -=
              f * a[static_cast<std::size_t>(c)][static_cast<std::size_t>(cc)];
      }
    }
    return det;
  };
  Real coarse = det_at(n), fine = det_at(2 * n);
  if (std::fabs(coarse - fine) > 1e-10L)
    throw numeric_error("discrete_fredholm_det: value unstable under doubling");
  if (diag) {
    diag->truncation = 2 * n;
    diag->nodes = 0;
    diag->est_error = std::fabs(coarse - fine);
    diag->imag_residue = 0.0L;
  }
  return fine;
}

namespace detail {

// 1F1(a, c; x) by direct series; terminates when a is a nonpositive integer.
inline Real hyp1f1(Real a, Real c, Real x) {
  Real term = 1.0L, sum = 1.0L;
  for (long i = 0; i < 500; ++i) {
    term *= (a + static_cast<Real>(i)) / (c + static_cast<Real>(i)) * x /
            static_cast<Real>(i + 1);
    sum += term;
    if (a + static_cast<Real>(i) == 0.0L) break;
    if (std::fabs(term) < 1e-22L * std::fabs(sum)) break;
  }
  return sum;
}

}  // namespace detail

// The printed confluent-hypergeometric form of the word-law kernel, kept
// verbatim so its normalization can be compared against the symbol route.
// zeta is the argument the sources print as xi^2.
inline Real charlier_printed_kernel(long p, Real zeta, Real j, Real kk) {
  Real pref = std::exp(std::lgamma(static_cast<Real>(p) + j + 1.0L) -
                       std::lgamma(static_cast<Real>(p)) - zeta);
  Real t1 = detail::hyp1f1(-static_cast<Real>(p), j + 1.0L, zeta) /
            std::exp(std::lgamma(j + 1.0L)) *
            detail::hyp1f1(-static_cast<Real>(p) + 1.0L, kk + 2.0L, zeta) /
            std::exp(std::lgamma(kk + 2.0L));
  Real t2 = detail::hyp1f1(-static_cast<Real>(p) + 1.0L, j + 2.0L, zeta) /
            std::exp(std::lgamma(j + 2.0L)) *
            detail::hyp1f1(-static_cast<Real>(p), kk + 1.0L, zeta) /
            std::exp(std::lgamma(kk + 1.0L));
  return pref * (t1 - t2) / (j - kk);
}

struct CharlierKernelDiagnostic {
  Real symbol_route = 0.0L;
  Real kernel_route = 0.0L;          // printed formula with zeta = xi^2
  Real kernel_route_sqrt_arg = 0.0L; // printed formula read with zeta = xi
  Real discrepancy = 0.0L;
  Real discrepancy_sqrt_arg = 0.0L;
  Real stability = 0.0L;

  std::string to_json() const {
    std::ostringstream os;
    os.precision(10);
    os << "{\"symbol_route\":" << static_cast<double>(symbol_route)
       << ",\"kernel_route\":" << static_cast<double>(kernel_route)
       << ",\"kernel_route_sqrt_arg\":" << static_cast<double>(kernel_route_sqrt_arg)
       << ",\"discrepancy\":" << static_cast<double>(discrepancy)
       << ",\"discrepancy_sqrt_arg\":" << static_cast<double>(discrepancy_sqrt_arg)
       << ",\"stability\":" << static_cast<double>(stability) << "}";
    return os.str();
  }
};

// Evaluates det(I - K_printed) over [n, n+1, ...) for both readings of the
// argument and reports the mismatch with the symbol-route value. The
// normalization question stays visible here; nothing is absorbed.
inline CharlierKernelDiagnostic charlier_kernel_diagnostic(Real xi, long p, long n) {
  CharlierKernelDiagnostic d;
  d.symbol_route = charlier_cdf(xi, p, n);
  auto det_for = [&](Real zeta, long size) -> Real {
    std::vector<std::vector<Real>> a(static_cast<std::size_t>(size),
                                     std::vector<Real>(static_cast<std::size_t>(size)));
    const Real h = 1e-4L;
    for (long i = 0; i < size; ++i)
      for (long j = 0; j < size; ++j) {
        Real ki, jj = static_cast<Real>(n + i), kk = static_cast<Real>(n + j);
        if (i == j)
          ki = (charlier_printed_kernel(p, zeta, jj, kk + h) +
                charlier_printed_kernel(p, zeta, jj, kk - h)) /
               2.0L;
        else
          ki = charlier_printed_kernel(p, zeta, jj, kk);
        a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            (i == j ? 1.0L : 0.0L) - ki;
      }
    Real det = 1.0L;
    for (long c = 0; c < size; ++c) {
      long piv = c;
      for (long r = c + 1; r < size; ++r)
        if (std::fabs(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]) >
            std::fabs(a[static_cast<std::size_t>(piv)][static_cast<std::size_t>(c)]))
          piv = r;
      if (piv != c) {
        std::swap(a[static_cast<std::size_t>(piv)], a[static_cast<std::size_t>(c)]);
        det = -det;
      }
      Real dd = a[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
      det *= dd;
      if (dd == 0.0L) break;
      for (long r = c + 1; r < size; ++r) {
        Real f = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] / dd;
        for (long cc = c; cc < size; ++cc)
          a[static_cast<std::size_t>(r)][static_cast<std::size_t>(cc)] -=
              f * a[static_cast<std::size_t>(c)][static_cast<std::size_t>(cc)];
      }
    }
    return det;
  };
  Real v32 = det_for(xi * xi, 32), v64 = det_for(xi * xi, 64);
  d.kernel_route = v64;
  d.stability = std::fabs(v64 - v32);
  d.kernel_route_sqrt_arg = det_for(xi, 64);
  d.discrepancy = std::fabs(d.kernel_route - d.symbol_route);
  d.discrepancy_sqrt_arg = std::fabs(d.kernel_route_sqrt_arg - d.symbol_route);
  return d;
}

}  // namespace rmt
