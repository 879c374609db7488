#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "rmtlab/common.hpp"
#include "rmtlab/exact_laws.hpp"

namespace rmt {

using Complex = std::complex<Real>;

inline Complex ipow(Complex z, long k) {
  if (k < 0) return 1.0L / ipow(z, -k);
  Complex r = 1.0L;
  while (k > 0) {
    if (k & 1) r *= z;
    z *= z;
    k >>= 1;
  }
  return r;
}

// How a determinant was produced: truncation/grid sizes and the stability
// estimate from the final refinement step.
struct DetDiagnostics {
  long truncation = 0;
  long nodes = 0;
  Real est_error = 0.0L;
  Real imag_residue = 0.0L;

  std::string to_json() const {
    std::ostringstream os;
    os.precision(6);
    os << "{\"truncation\":" << truncation << ",\"nodes\":" << nodes
       << ",\"estimated_error\":" << static_cast<double>(est_error)
       << ",\"imag_residue\":" << static_cast<double>(imag_residue) << "}";
    return os.str();
  }
};

// A symbol on the unit circle with lazily extended Fourier coefficients.
// Instances are cheap; share one per thread.
class ToeplitzSymbol {
 public:
  explicit ToeplitzSymbol(std::function<Complex(Complex)> f) : eval_(std::move(f)) {}

  Complex operator()(Complex z) const { return eval_(z); }

  // c_k for |k| <= range, by uniform circle quadrature with doubling
  const std::vector<Complex>& coefficients(long range) const {
    ensure(range);
    return coeffs_;
  }
  Complex coefficient(long k) const {
    ensure(std::labs(k));
    return coeffs_[static_cast<std::size_t>(k + range_)];
  }
  long cached_range() const { return range_; }
  long nodes_used() const { return nodes_; }
  Real quadrature_change() const { return last_change_; }

  // max |sum c_k z^k - sigma(z)| over a grid avoiding the quadrature nodes
  Real roundtrip_error(long range, long n_test = 37) const {
    ensure(range);
    const Real pi = 3.14159265358979323846264338327950288L;
    Real worst = 0.0L;
    for (long t = 0; t < n_test; ++t) {
      Real th = 2.0L * pi * (static_cast<Real>(t) + 0.123L) / static_cast<Real>(n_test);
      Complex z(std::cos(th), std::sin(th));
      Complex s = 0.0L;
      for (long k = -range_; k <= range_; ++k)
        s += coeffs_[static_cast<std::size_t>(k + range_)] * ipow(z, k);
      worst = std::max(worst, std::abs(s - eval_(z)));
    }
    return worst;
  }

 private:
  void ensure(long range) const {
    if (range_ >= range) return;
    const Real pi = 3.14159265358979323846264338327950288L;
    long m = 64;
    while (m < 8 * (range + 1)) m *= 2;
    std::vector<Complex> prev;
    for (; m <= (1L << 22); m *= 2) {
      std::vector<Complex> cur(static_cast<std::size_t>(2 * range + 1));
      std::vector<Complex> vals(static_cast<std::size_t>(m));
      for (long i = 0; i < m; ++i) {
        Real th = 2.0L * pi * static_cast<Real>(i) / static_cast<Real>(m);
        vals[static_cast<std::size_t>(i)] = eval_(Complex(std::cos(th), std::sin(th)));
      }
      for (long k = -range; k <= range; ++k) {
        Complex s = 0.0L;
        for (long i = 0; i < m; ++i) {
          Real th = -2.0L * pi * static_cast<Real>(k) * static_cast<Real>(i) /
                    static_cast<Real>(m);
          s += vals[static_cast<std::size_t>(i)] * Complex(std::cos(th), std::sin(th));
        }
        cur[static_cast<std::size_t>(k + range)] = s / static_cast<Real>(m);
      }
      if (!prev.empty()) {
        Real change = 0.0L;
        for (std::size_t i = 0; i < cur.size(); ++i)
          change = std::max(change, std::abs(cur[i] - prev[i]));
        if (change < 1e-13L) {
          coeffs_ = std::move(cur);
          range_ = range;
          nodes_ = m;
          last_change_ = change;
          return;
        }
      }
      prev = std::move(cur);
    }
    throw numeric_error("symbol_coefficients: circle quadrature did not converge");
  }

  std::function<Complex(Complex)> eval_;
  mutable std::vector<Complex> coeffs_;
  mutable long range_ = -1;
  mutable long nodes_ = 0;
  mutable Real last_change_ = 0.0L;
};

inline std::vector<Complex> symbol_coefficients(const ToeplitzSymbol& sigma, long range) {
  return sigma.coefficients(range);
}

// det(c_{j-l})_{n x n} by LU with partial pivoting; n = 0 gives 1.
inline Real toeplitz_det(const ToeplitzSymbol& sigma, long n, DetDiagnostics* diag = nullptr) {
  if (n < 0) throw std::invalid_argument("toeplitz_det: n must be >= 0");
  if (n == 0) {
    if (diag) *diag = DetDiagnostics{0, 0, 0.0L, 0.0L};
    return 1.0L;
  }
  sigma.coefficients(n - 1);
  std::vector<std::vector<Complex>> a(static_cast<std::size_t>(n),
                                      std::vector<Complex>(static_cast<std::size_t>(n)));
  for (long j = 0; j < n; ++j)
    for (long l = 0; l < n; ++l)
      a[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)] = sigma.coefficient(j - l);
  Complex det = 1.0L;
  for (long c = 0; c < n; ++c) {
    long piv = c;
    for (long r = c + 1; r < n; ++r)
      if (std::abs(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]) >
          std::abs(a[static_cast<std::size_t>(piv)][static_cast<std::size_t>(c)]))
        piv = r;
    if (piv != c) {
      std::swap(a[static_cast<std::size_t>(piv)], a[static_cast<std::size_t>(c)]);
      det = -det;
    }
    Complex d = a[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
    det *= d;
    if (std::abs(d) == 0.0L) break;
    for (long r = c + 1; r < n; ++r) {
      Complex f = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] / d;
      if (std::abs(f) == 0.0L) continue;
      for (long cc = c; cc < n; ++cc)
        a[static_cast<std::size_t>(r)][static_cast<std::size_t>(cc)] -=
            f * a[static_cast<std::size_t>(c)][static_cast<std::size_t>(cc)];
    }
  }
  if (diag) {
    diag->truncation = n;
    diag->nodes = sigma.nodes_used();
    diag->est_error = sigma.quadrature_change() * static_cast<Real>(n);
    diag->imag_residue = std::fabs(det.imag());
  }
  return det.real();
}

inline ToeplitzSymbol gessel_symbol(Real xi) {
  Real s = std::sqrt(xi);
  return ToeplitzSymbol([s](Complex z) { return std::exp(s * (z + 1.0L / z)); });
}

inline ToeplitzSymbol charlier_symbol(Real xi, long p) {
  return ToeplitzSymbol([xi, p](Complex z) {
    return std::exp(xi / z) * ipow(1.0L + z, p);
  });
}

inline ToeplitzSymbol meixner_symbol(Real xi, long p, long q) {
  Real s = std::sqrt(xi);
  return ToeplitzSymbol([s, p, q](Complex z) {
    return ipow(1.0L + s * z, q) * ipow(1.0L + s / z, p);
  });
}

// Length law for the longest weakly increasing subsequence of Poissonized
// words on p letters, via the circle-quadrature determinant.
inline Real charlier_cdf(Real xi, long p, long n, DetDiagnostics* diag = nullptr) {
  if (!(xi > 0.0L) || p < 1 || n < 0)
    throw std::invalid_argument("charlier_cdf: need xi > 0, p >= 1, n >= 0");
  ToeplitzSymbol sigma = charlier_symbol(xi, p);
  return std::exp(-static_cast<Real>(p) * xi) * toeplitz_det(sigma, n, diag);
}

// Same law by Poisson-mixing the exact word-law values.
inline Real charlier_cdf_series(Real xi, long p, long n) {
  if (!(xi > 0.0L) || p < 1 || n < 0)
    throw std::invalid_argument("charlier_cdf_series: need xi > 0, p >= 1, n >= 0");
  Real mean = static_cast<Real>(p) * xi;
  Real sum = 0.0L, logw = -mean;
  long k = 0;
  while (true) {
    Real cdf = (k == 0) ? 1.0L : to_real(word_lis_cdf(k, p, n));
    sum += std::exp(logw) * cdf;
    ++k;
    logw += std::log(mean) - std::log(static_cast<Real>(k));
    if (static_cast<Real>(k + 2) > mean &&
        std::exp(logw) / (1.0L - mean / static_cast<Real>(k + 2)) < 1e-15L)
      break;
  }
  return sum;
}

// Geometric percolation law through the Meixner-weight symbol.
inline Real meixner_cdf(Real xi, long p, long q, long ell, DetDiagnostics* diag = nullptr) {
  if (!(xi > 0.0L && xi < 1.0L))
    throw std::invalid_argument("meixner_cdf: xi must lie in (0,1)");
  if (!(q >= p && p >= 1)) throw std::invalid_argument("meixner_cdf: need q >= p >= 1");
  if (ell < 0) throw std::invalid_argument("meixner_cdf: ell must be >= 0");
  ToeplitzSymbol sigma = meixner_symbol(xi, p, q);
  Real pref = std::pow(1.0L - xi, static_cast<Real>(p) * static_cast<Real>(q));
  return pref * toeplitz_det(sigma, ell, diag);
}

}  // namespace rmt
