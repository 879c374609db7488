#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "rmtlab/bessel.hpp"
#include "rmtlab/cd_kernel.hpp"
#include "rmtlab/discrete_kernels.hpp"
#include "rmtlab/exact_laws.hpp"
#include "rmtlab/quadrature.hpp"
#include "rmtlab/toeplitz.hpp"

using rmt::CDKernel;
using rmt::Complex;
using rmt::DetDiagnostics;
using rmt::DiscreteKernel;
using rmt::IntervalList;
using rmt::Real;
using rmt::WeightFamily;

namespace {

constexpr Real kPi = 3.141592653589793238462643383279502884L;

// J_n(x) as the mean of cos(n t - x sin t) over one period; the integrand is
// periodic, so the uniform mean converges far below the comparison tolerance.
Real bessel_j_integral(long n, Real x) {
  const long m = 2048;
  Real sum = 0.0L;
  for (long i = 0; i < m; ++i) {
    Real t = 2.0L * kPi * static_cast<Real>(i) / static_cast<Real>(m);
    sum += std::cos(static_cast<Real>(n) * t - x * std::sin(t));
  }
  return sum / static_cast<Real>(m);
}

// I_n(x) by its power series
Real bessel_i_series(long n, Real x) {
  if (n < 0) n = -n;
  Real term = std::exp(static_cast<Real>(n) * std::log(x / 2.0L) -
                       std::lgamma(static_cast<Real>(n) + 1.0L));
  Real sum = term;
  for (long m = 0; m < 400; ++m) {
    term *= (x / 2.0L) * (x / 2.0L) /
            (static_cast<Real>(m + 1) * static_cast<Real>(m + 1 + n));
    sum += term;
    if (term < 1e-25L * sum) break;
  }
  return sum;
}

Real det_small(std::vector<std::vector<Real>> a) {
  std::size_t n = a.size();
  Real det = 1.0L;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = -det;
    }
    det *= a[c][c];
    if (a[c][c] == 0.0L) return 0.0L;
    for (std::size_t r = c + 1; r < n; ++r) {
      Real f = a[r][c] / a[c][c];
      for (std::size_t cc = c; cc < n; ++cc) a[r][cc] -= f * a[c][cc];
    }
  }
  return det;
}

Real inf() { return std::numeric_limits<Real>::infinity(); }

}  // namespace

TEST_CASE("constant symbol has a single fourier coefficient") {
  rmt::ToeplitzSymbol one([](Complex) { return Complex(1.0L); });
  CHECK(std::fabs(one.coefficient(0).real() - 1.0L) < 1e-14L);
  for (long k = 1; k <= 5; ++k) {
    CHECK(std::abs(one.coefficient(k)) < 1e-14L);
    CHECK(std::abs(one.coefficient(-k)) < 1e-14L);
  }
  CHECK(one.cached_range() >= 5);
  CHECK(one.nodes_used() > 0);
}

TEST_CASE("exponential symbol coefficients match the modified-series expansion") {
  for (Real xi : {0.5L, 2.0L}) {
    rmt::ToeplitzSymbol sym = rmt::gessel_symbol(xi);
    Real x = 2.0L * std::sqrt(xi);
    for (long k = -10; k <= 10; ++k) {
      Complex c = sym.coefficient(k);
      CHECK(std::fabs(c.real() - bessel_i_series(k, x)) < 1e-12L);
      CHECK(std::fabs(c.imag()) < 1e-13L);
    }
  }
}

TEST_CASE("symbols reconstruct from their coefficients") {
  CHECK(rmt::gessel_symbol(1.0L).roundtrip_error(14) < 1e-11L);
  CHECK(rmt::meixner_symbol(0.3L, 2, 3).roundtrip_error(6) < 1e-11L);
  CHECK(rmt::charlier_symbol(0.5L, 2).roundtrip_error(12) < 1e-11L);
}

TEST_CASE("toeplitz determinant basics") {
  rmt::ToeplitzSymbol one([](Complex) { return Complex(1.0L); });
  DetDiagnostics diag;
  CHECK(rmt::toeplitz_det(one, 0) == 1.0L);
  for (long n = 1; n <= 6; ++n) CHECK(std::fabs(rmt::toeplitz_det(one, n) - 1.0L) < 1e-13L);
  Real v = rmt::toeplitz_det(rmt::gessel_symbol(1.0L), 3, &diag);
  CHECK(v > 0.0L);
  CHECK(diag.imag_residue < 1e-12L);
  CHECK(diag.nodes > 0);
  std::string js = diag.to_json();
  CHECK(js.find("\"truncation\"") != std::string::npos);
  CHECK(js.find("\"estimated_error\"") != std::string::npos);
  CHECK_THROWS_AS(rmt::toeplitz_det(one, -1), std::invalid_argument);
}

TEST_CASE("toeplitz determinant equals the determinant of series coefficients") {
  for (Real xi : {0.5L, 2.0L}) {
    Real x = 2.0L * std::sqrt(xi);
    for (long n = 1; n <= 5; ++n) {
      std::vector<std::vector<Real>> a(static_cast<std::size_t>(n),
                                       std::vector<Real>(static_cast<std::size_t>(n)));
      for (long j = 0; j < n; ++j)
        for (long l = 0; l < n; ++l)
          a[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)] = bessel_i_series(j - l, x);
      Real lhs = rmt::toeplitz_det(rmt::gessel_symbol(xi), n);
      CHECK(std::fabs(lhs - det_small(a)) < 1e-10L);
    }
  }
}

TEST_CASE("discrete Bessel table matches the averaged-cosine representation") {
  for (Real x : {0.5L, 2.0L, 5.0L}) {
    auto table = rmt::bessel_j_table(x, 12);
    for (long n = 0; n <= 12; ++n) {
      CHECK(std::fabs(table[static_cast<std::size_t>(n)] - bessel_j_integral(n, x)) < 1e-14L);
      CHECK(std::fabs(table[static_cast<std::size_t>(n)]) <=
            rmt::bessel_j_envelope(x, n) + 1e-18L);
    }
  }
  auto zero = rmt::bessel_j_table(0.0L, 4);
  CHECK(zero[0] == 1.0L);
  CHECK(zero[3] == 0.0L);
}

TEST_CASE("discrete kernel symmetry, positivity, tail bound") {
  DiscreteKernel k = rmt::bessel_kernel(1.0L);
  for (long a = 0; a <= 6; ++a)
    for (long b = 0; b <= 6; ++b) CHECK(k.eval(a, b) == k.eval(b, a));
  for (long a = 0; a <= 6; ++a) CHECK(k.eval(a, a) > 0.0L);
  for (long s : {0L, 2L, 5L}) {
    Real partial = 0.0L;
    for (long i = s; i < s + 60; ++i) partial += k.eval(i, i);
    CHECK(partial <= k.tail_bound(s));
    CHECK(k.tail_bound(s + 1) < k.tail_bound(s));
  }
}

TEST_CASE("discrete Fredholm determinant on degenerate kernels") {
  DiscreteKernel zero;
  zero.eval = [](long, long) { return 0.0L; };
  zero.tail_bound = [](long) { return 0.0L; };
  CHECK(rmt::discrete_fredholm_det(zero, 0) == 1.0L);

  // rank one: det(I - aa^T) restricted to [s, ...) is 1 - sum of tail squares
  DiscreteKernel rank1;
  rank1.eval = [](long i, long j) {
    if (i >= 8 || j >= 8) return 0.0L;
    return std::pow(0.5L, static_cast<Real>(i)) * std::pow(0.5L, static_cast<Real>(j));
  };
  rank1.tail_bound = [](long s) {
    Real t = 0.0L;
    for (long i = std::max(s, 0L); i < 8; ++i) t += std::pow(0.25L, static_cast<Real>(i));
    return t;
  };
  for (long s : {0L, 2L, 5L}) {
    Real expect = 1.0L;
    for (long i = s; i < 8; ++i) expect -= std::pow(0.25L, static_cast<Real>(i));
    CHECK(std::fabs(rmt::discrete_fredholm_det(rank1, s) - expect) < 1e-12L);
  }
}

TEST_CASE("divergent tails are refused") {
  DiscreteKernel flat;
  flat.eval = [](long i, long j) { return 1.0L / (1.0L + std::fabs(static_cast<Real>(i - j))); };
  flat.tail_bound = [](long) { return 1.0L; };
  CHECK_THROWS_AS(rmt::discrete_fredholm_det(flat, 0), rmt::numeric_error);

  DiscreteKernel infinite = flat;
  infinite.tail_bound = [](long) { return std::numeric_limits<Real>::infinity(); };
  CHECK_THROWS_AS(rmt::discrete_fredholm_det(infinite, 0), rmt::numeric_error);
}

TEST_CASE("three routes to the poissonized length law agree") {
  for (Real xi : {0.5L, 1.0L, 2.0L, 4.0L}) {
    for (long n : {1L, 3L, 5L, 8L}) {
      Real via_det = std::exp(-xi) * rmt::toeplitz_det(rmt::gessel_symbol(xi), n);
      Real via_kernel = rmt::discrete_fredholm_det(rmt::bessel_kernel(xi), n);
      Real via_mixing = rmt::poissonized_plancherel_cdf(xi, -1, n);
      CHECK(std::fabs(via_det - via_kernel) < 1e-8L);
      CHECK(std::fabs(via_det - via_mixing) < 1e-8L);
      CHECK(std::fabs(via_kernel - via_mixing) < 1e-8L);
    }
  }
}

TEST_CASE("word-law transform: one-letter alphabet is a truncated counting series") {
  Real xi = 0.8L;
  for (long n = 0; n <= 6; ++n) {
    Real expect = 0.0L, term = std::exp(-xi);
    for (long m = 0; m <= n; ++m) {
      expect += term;
      term *= xi / static_cast<Real>(m + 1);
    }
    CHECK(std::fabs(rmt::charlier_cdf(xi, 1, n) - expect) < 1e-10L);
  }
}

TEST_CASE("word-law transform agrees with direct mixing") {
  CHECK(std::fabs(rmt::charlier_cdf(0.5L, 2, 3) - rmt::charlier_cdf_series(0.5L, 2, 3)) < 1e-8L);
  CHECK(std::fabs(rmt::charlier_cdf(1.0L, 3, 4) - rmt::charlier_cdf_series(1.0L, 3, 4)) < 1e-8L);
}

TEST_CASE("word-law transform limits and domain") {
  CHECK(std::fabs(rmt::charlier_cdf(1e-12L, 3, 2) - 1.0L) < 1e-9L);
  CHECK_THROWS_AS(rmt::charlier_cdf(0.0L, 2, 3), std::invalid_argument);
  CHECK_THROWS_AS(rmt::charlier_cdf(-1.0L, 2, 3), std::invalid_argument);
  CHECK_THROWS_AS(rmt::charlier_cdf(0.5L, 0, 3), std::invalid_argument);
  CHECK_THROWS_AS(rmt::charlier_cdf(0.5L, 2, -1), std::invalid_argument);
}

TEST_CASE("geometric-weight transform: single site closed form") {
  for (long ell : {0L, 1L, 5L}) {
    Real expect = 1.0L - std::pow(0.37L, static_cast<Real>(ell + 1));
    CHECK(std::fabs(rmt::meixner_cdf(0.37L, 1, 1, ell) - expect) < 1e-12L);
  }
}

TEST_CASE("geometric-weight transform agrees with the shape sum") {
  Real via_det = rmt::meixner_cdf(0.3L, 2, 3, 4);
  Real via_shapes = rmt::geometric_lpp_cdf(2, 3, 0.3L, 4);
  CHECK(std::fabs(via_det - via_shapes) < 1e-8L);
  CHECK(std::fabs(rmt::meixner_cdf(0.3L, 2, 3, 120) - 1.0L) < 1e-10L);
  CHECK_THROWS_AS(rmt::meixner_cdf(0.0L, 1, 1, 3), std::invalid_argument);
  CHECK_THROWS_AS(rmt::meixner_cdf(1.0L, 1, 1, 3), std::invalid_argument);
  CHECK_THROWS_AS(rmt::meixner_cdf(0.3L, 3, 2, 3), std::invalid_argument);
  CHECK_THROWS_AS(rmt::meixner_cdf(0.3L, 1, 1, -1), std::invalid_argument);
}

TEST_CASE("orthonormal families: norms and orthogonality") {
  CDKernel hermite(WeightFamily::Hermite, 3);
  for (long j = 0; j <= 8; ++j) {
    Real expect = 0.5L * std::log(kPi) + std::lgamma(static_cast<Real>(j) + 1.0L) -
                  static_cast<Real>(j) * std::log(2.0L);
    CHECK(std::fabs(hermite.log_squared_norm(j) - expect) < 1e-12L);
  }
  auto check_orthonormal = [](const CDKernel& k, long m, Real lo, Real hi) {
    for (long i = 0; i <= m; ++i)
      for (long j = i; j <= m; ++j) {
        Real v = rmt::integrate_adaptive(
            [&](Real z) {
              auto q = k.weighted_polys(z, m);
              return q[static_cast<std::size_t>(i)] * q[static_cast<std::size_t>(j)];
            },
            lo, hi, 1e-13L);
        CHECK(std::fabs(v - (i == j ? 1.0L : 0.0L)) < 1e-10L);
      }
  };
  check_orthonormal(hermite, 10, -12.0L, 12.0L);
  check_orthonormal(CDKernel(WeightFamily::Laguerre, 2, 1.0L), 6, 0.0L, 120.0L);
  check_orthonormal(CDKernel(WeightFamily::Jacobi, 2, 0.0L, 0.0L), 6, -1.0L, 1.0L);
}

TEST_CASE("projection kernel: summed and single-term forms coincide") {
  CDKernel hermite(WeightFamily::Hermite, 3);
  CHECK(std::fabs(hermite(0.3L, 1.1L) - hermite.difference_form(0.3L, 1.1L)) < 1e-12L);
  CDKernel jac(WeightFamily::Jacobi, 4, 0.5L, 1.5L);
  CHECK(std::fabs(jac(-0.2L, 0.6L) - jac.difference_form(-0.2L, 0.6L)) < 1e-12L);
  CDKernel lag(WeightFamily::Laguerre, 2, 1.0L);
  CHECK(std::fabs(lag(0.7L, 2.4L) - lag.difference_form(0.7L, 2.4L)) < 1e-12L);
  CHECK_THROWS_AS(CDKernel(WeightFamily::Hermite, 0), std::invalid_argument);
  CHECK_THROWS_AS(CDKernel(WeightFamily::Laguerre, 2, -1.5L), std::invalid_argument);
  CHECK_THROWS_AS(CDKernel(WeightFamily::Jacobi, 2, 0.0L, -2.0L), std::invalid_argument);
}

TEST_CASE("projection kernel integrates to its rank and reproduces itself") {
  auto hermite3 = rmt::reproducing_check(CDKernel(WeightFamily::Hermite, 3), -4.0L, 4.0L);
  CHECK(std::fabs(hermite3.trace - 3.0L) < 1e-8L);
  auto laguerre2 = rmt::reproducing_check(CDKernel(WeightFamily::Laguerre, 2, 1.0L), 0.5L, 4.0L);
  CHECK(std::fabs(laguerre2.trace - 2.0L) < 1e-8L);
  auto hermite4 = rmt::reproducing_check(CDKernel(WeightFamily::Hermite, 4), -4.0L, 4.0L);
  CHECK(hermite4.defect < 1e-6L);
}

TEST_CASE("vanishing-set probability: rank-one case is the gaussian mass") {
  CDKernel k(WeightFamily::Hermite, 1);
  for (Real y : {-1.0L, 0.0L, 0.7L}) {
    IntervalList e = IntervalList::normalized({{y, inf()}});
    Real expect = 0.5L * (1.0L + std::erf(y));
    CHECK(std::fabs(rmt::gap_probability(k, e) - expect) < 1e-8L);
  }
}

TEST_CASE("vanishing-set probability: structure") {
  CDKernel hermite3(WeightFamily::Hermite, 3);
  IntervalList empty;
  CHECK(rmt::gap_probability(hermite3, empty) == 1.0L);

  CDKernel hermite2(WeightFamily::Hermite, 2);
  IntervalList whole = IntervalList::normalized({{-inf(), inf()}});
  CHECK(std::fabs(rmt::gap_probability(hermite2, whole)) < 1e-8L);

  Real g1 = rmt::gap_probability(hermite3, IntervalList::normalized({{0.0L, 1.0L}}));
  Real g2 = rmt::gap_probability(hermite3, IntervalList::normalized({{0.0L, 2.0L}}));
  Real g3 = rmt::gap_probability(hermite3, IntervalList::normalized({{-1.0L, 2.0L}}));
  CHECK(g1 > g2);
  CHECK(g2 > g3);
  CHECK(g3 > 0.0L);
  CHECK(g1 < 1.0L);

  DetDiagnostics diag;
  Real lg = rmt::gap_probability(CDKernel(WeightFamily::Laguerre, 2, 1.0L),
                                 IntervalList::normalized({{0.0L, 1.0L}}), &diag);
  CHECK(lg > 0.0L);
  CHECK(lg < 1.0L);
  CHECK(diag.nodes >= 80);
  Real jg = rmt::gap_probability(CDKernel(WeightFamily::Jacobi, 2),
                                 IntervalList::normalized({{-0.3L, 0.4L}}));
  CHECK(jg > 0.0L);
  CHECK(jg < 1.0L);
}

TEST_CASE("vanishing-set probability: node starvation is reported") {
  CDKernel hermite3(WeightFamily::Hermite, 3);
  IntervalList e = IntervalList::normalized({{-1.0L, 1.0L}});
  CHECK_THROWS_AS(rmt::gap_probability(hermite3, e, nullptr, 40), rmt::numeric_error);
}

TEST_CASE("word-law kernel normalization diagnostic stays visible") {
  rmt::CharlierKernelDiagnostic d = rmt::charlier_kernel_diagnostic(0.5L, 2, 3);
  CHECK(d.symbol_route > 0.0L);
  CHECK(d.symbol_route < 1.0L);
  CHECK(std::isfinite(static_cast<double>(d.kernel_route)));
  CHECK(std::isfinite(static_cast<double>(d.kernel_route_sqrt_arg)));
  CHECK(std::isfinite(static_cast<double>(d.stability)));
  std::string js = d.to_json();
  CHECK(js.find("\"symbol_route\"") != std::string::npos);
  CHECK(js.find("\"discrepancy_sqrt_arg\"") != std::string::npos);
}
