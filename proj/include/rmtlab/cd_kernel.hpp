#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rmtlab/common.hpp"
#include "rmtlab/quadrature.hpp"
#include "rmtlab/toeplitz.hpp"

namespace rmt {

enum class WeightFamily { Hermite, Laguerre, Jacobi };

// Projection kernel of an n-point orthogonal-polynomial ensemble, evaluated
// with the weight folded in. Polynomials are generated by the orthonormal
// three-term recurrence; values are rescaled on the fly so intermediate
// growth never overflows even where the weight alone would underflow.
class CDKernel {
 public:
  CDKernel(WeightFamily family, long n, Real a = 0.0L, Real b = 0.0L)
      : family_(family), n_(n), a_(a), b_(b) {
    if (n < 1) throw std::invalid_argument("CDKernel: order must be >= 1");
    switch (family_) {
      case WeightFamily::Hermite:
        log_h0_ = 0.5L * std::log(pi());
        lo_ = -std::numeric_limits<Real>::infinity();
        hi_ = std::numeric_limits<Real>::infinity();
        break;
      case WeightFamily::Laguerre:
        if (!(a_ > -1.0L)) throw std::invalid_argument("CDKernel: Laguerre needs a > -1");
        log_h0_ = std::lgamma(a_ + 1.0L);
        lo_ = 0.0L;
        hi_ = std::numeric_limits<Real>::infinity();
        break;
      case WeightFamily::Jacobi:
        if (!(a_ > -1.0L) || !(b_ > -1.0L))
          throw std::invalid_argument("CDKernel: Jacobi needs a, b > -1");
        log_h0_ = (a_ + b_ + 1.0L) * std::log(2.0L) + std::lgamma(a_ + 1.0L) +
                  std::lgamma(b_ + 1.0L) - std::lgamma(a_ + b_ + 2.0L);
        lo_ = -1.0L;
        hi_ = 1.0L;
        break;
    }
  }

  WeightFamily family() const { return family_; }
  long order() const { return n_; }
  Real param_a() const { return a_; }
  Real param_b() const { return b_; }
  Real support_lo() const { return lo_; }
  Real support_hi() const { return hi_; }

  Real log_weight(Real z) const {
    switch (family_) {
      case WeightFamily::Hermite:
        return -z * z;
      case WeightFamily::Laguerre:
        if (z < 0.0L) return -std::numeric_limits<Real>::infinity();
        if (z == 0.0L)
          return a_ == 0.0L ? 0.0L
                            : (a_ > 0.0L ? -std::numeric_limits<Real>::infinity()
                                         : std::numeric_limits<Real>::infinity());
        return a_ * std::log(z) - z;
      case WeightFamily::Jacobi:
        if (z <= -1.0L || z >= 1.0L) return -std::numeric_limits<Real>::infinity();
        return a_ * std::log(1.0L - z) + b_ * std::log(1.0L + z);
    }
    return 0.0L;
  }
  Real weight(Real z) const { return std::exp(log_weight(z)); }

  Real recur_alpha(long j) const {
    switch (family_) {
      case WeightFamily::Hermite:
        return 0.0L;
      case WeightFamily::Laguerre:
        return 2.0L * static_cast<Real>(j) + a_ + 1.0L;
      case WeightFamily::Jacobi: {
        if (j == 0) return (b_ - a_) / (a_ + b_ + 2.0L);
        Real s = 2.0L * static_cast<Real>(j) + a_ + b_;
        return (b_ * b_ - a_ * a_) / (s * (s + 2.0L));
      }
    }
    return 0.0L;
  }

  Real recur_beta(long j) const {
    switch (family_) {
      case WeightFamily::Hermite:
        return static_cast<Real>(j) / 2.0L;
      case WeightFamily::Laguerre:
        return static_cast<Real>(j) * (static_cast<Real>(j) + a_);
      case WeightFamily::Jacobi: {
        Real jj = static_cast<Real>(j), s = 2.0L * jj + a_ + b_;
        return 4.0L * jj * (jj + a_) * (jj + b_) * (jj + a_ + b_) /
               (s * s * (s + 1.0L) * (s - 1.0L));
      }
    }
    return 0.0L;
  }

  // log of the squared norm of the degree-j monic polynomial
  Real log_squared_norm(long j) const {
    Real v = log_h0_;
    for (long i = 1; i <= j; ++i) v += std::log(recur_beta(i));
    return v;
  }

  // orthonormal values p_0(z) ... p_m(z)
  std::vector<Real> orthonormal(Real z, long m) const {
    std::vector<Real> out(static_cast<std::size_t>(m) + 1);
    Real prev = 0.0L, cur = std::exp(-0.5L * log_h0_);
    out[0] = cur;
    for (long j = 0; j < m; ++j) {
      Real sb1 = std::sqrt(recur_beta(j + 1));
      Real nxt = ((z - recur_alpha(j)) * cur - (j > 0 ? std::sqrt(recur_beta(j)) : 0.0L) * prev) / sb1;
      prev = cur;
      cur = nxt;
      out[static_cast<std::size_t>(j) + 1] = cur;
    }
    return out;
  }

  // p_0(z)*sqrt(w(z)) ... p_m(z)*sqrt(w(z)), safe against growth of either factor
  std::vector<Real> weighted_polys(Real z, long m) const {
    Real lw = log_weight(z);
    std::vector<Real> out(static_cast<std::size_t>(m) + 1, 0.0L);
    if (lw == -std::numeric_limits<Real>::infinity()) return out;
    Real prev = 0.0L, cur = 1.0L, shift = -0.5L * log_h0_ + 0.5L * lw;
    auto emit = [&](long j, Real v) {
      Real e = shift;
      out[static_cast<std::size_t>(j)] = (e < -11000.0L) ? 0.0L : v * std::exp(e);
    };
    emit(0, cur);
    for (long j = 0; j < m; ++j) {
      Real sb1 = std::sqrt(recur_beta(j + 1));
      Real nxt = ((z - recur_alpha(j)) * cur - (j > 0 ? std::sqrt(recur_beta(j)) : 0.0L) * prev) / sb1;
      prev = cur;
      cur = nxt;
      if (std::fabs(cur) > 1e200L) {
        cur *= 1e-200L;
        prev *= 1e-200L;
        shift += 200.0L * std::log(10.0L);
      }
      emit(j + 1, cur);
    }
    return out;
  }

  Real operator()(Real y, Real z) const {
    auto qy = weighted_polys(y, n_ - 1);
    auto qz = weighted_polys(z, n_ - 1);
    Real s = 0.0L;
    for (long j = 0; j < n_; ++j)
      s += qy[static_cast<std::size_t>(j)] * qz[static_cast<std::size_t>(j)];
    return s;
  }

  Real diagonal(Real z) const {
    auto q = weighted_polys(z, n_ - 1);
    Real s = 0.0L;
    for (Real v : q) s += v * v;
    return s;
  }

  // single-term form of the same kernel, valid off the diagonal
  Real difference_form(Real y, Real z) const {
    if (y == z) return diagonal(z);
    auto qy = weighted_polys(y, n_);
    auto qz = weighted_polys(z, n_);
    Real sb = std::sqrt(recur_beta(n_));
    std::size_t n = static_cast<std::size_t>(n_);
    return sb * (qy[n] * qz[n - 1] - qy[n - 1] * qz[n]) / (y - z);
  }

 private:
  static Real pi() { return 3.14159265358979323846264338327950288L; }

  WeightFamily family_;
  long n_;
  Real a_, b_;
  Real log_h0_ = 0.0L;
  Real lo_ = 0.0L, hi_ = 0.0L;
};

inline CDKernel cd_kernel(WeightFamily family, long n, Real a = 0.0L, Real b = 0.0L) {
  return CDKernel(family, n, a, b);
}

namespace detail {

// finite box outside which the diagonal of the kernel is below 1e-18
inline std::pair<Real, Real> diagonal_safe_box(const CDKernel& k) {
  Real lo = k.support_lo(), hi = k.support_hi();
  if (std::isfinite(lo) && std::isfinite(hi)) return {lo, hi};
  Real n = static_cast<Real>(k.order());
  if (!std::isfinite(hi)) {
    hi = (k.family() == WeightFamily::Hermite) ? std::sqrt(2.0L * n) + 8.0L
                                               : 4.0L * n + 40.0L + 4.0L * std::fabs(k.param_a());
    for (int i = 0; i < 400 && k.diagonal(hi) > 1e-18L; ++i) hi += 2.0L;
  }
  if (!std::isfinite(lo)) {
    lo = -(std::sqrt(2.0L * n) + 8.0L);
    for (int i = 0; i < 400 && k.diagonal(lo) > 1e-18L; ++i) lo -= 2.0L;
  }
  return {lo, hi};
}

// finite box outside which weight(z) * z^(2n) is negligible for moment sums
inline std::pair<Real, Real> moment_safe_box(const CDKernel& k) {
  Real lo = k.support_lo(), hi = k.support_hi();
  if (std::isfinite(lo) && std::isfinite(hi)) return {lo, hi};
  Real deg = 2.0L * static_cast<Real>(k.order());
  auto heavy = [&](Real z) {
    return k.log_weight(z) + deg * std::log(std::fabs(z) + 1.0L) > -60.0L;
  };
  if (!std::isfinite(hi)) {
    hi = 8.0L + 4.0L * static_cast<Real>(k.order());
    for (int i = 0; i < 400 && heavy(hi); ++i) hi += 4.0L;
  }
  if (!std::isfinite(lo)) {
    lo = -(8.0L + 4.0L * static_cast<Real>(k.order()));
    for (int i = 0; i < 400 && heavy(lo); ++i) lo -= 4.0L;
  }
  return {lo, hi};
}

inline Real lu_det(std::vector<std::vector<Real>>& a) {
  long n = static_cast<long>(a.size());
  Real det = 1.0L;
  for (long c = 0; c < n; ++c) {
    long piv = c;
    for (long r = c + 1; r < n; ++r)
      if (std::fabs(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]) >
          std::fabs(a[static_cast<std::size_t>(piv)][static_cast<std::size_t>(c)]))
        piv = r;
    if (piv != c) {
      std::swap(a[static_cast<std::size_t>(piv)], a[static_cast<std::size_t>(c)]);
      det = -det;
    }
    Real d = a[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
    det *= d;
    if (d == 0.0L) return 0.0L;
    for (long r = c + 1; r < n; ++r) {
      Real f = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] / d;
      if (f == 0.0L) continue;
      for (long cc = c; cc < n; ++cc)
        a[static_cast<std::size_t>(r)][static_cast<std::size_t>(cc)] -=
            f * a[static_cast<std::size_t>(c)][static_cast<std::size_t>(cc)];
    }
  }
  return det;
}

inline Real nystrom_det_at(const CDKernel& k, const IntervalList& pieces, long m) {
  std::vector<Real> xs, ws;
  for (const auto& [a, b] : pieces.parts) {
    QuadratureRule r = gauss_legendre_on(m, a, b);
    xs.insert(xs.end(), r.nodes.begin(), r.nodes.end());
    ws.insert(ws.end(), r.weights.begin(), r.weights.end());
  }
  long n = static_cast<long>(xs.size());
  std::vector<std::vector<Real>> mat(static_cast<std::size_t>(n),
                                     std::vector<Real>(static_cast<std::size_t>(n)));
  std::vector<Real> sq(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) sq[static_cast<std::size_t>(i)] = std::sqrt(ws[static_cast<std::size_t>(i)]);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j)
      mat[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          (i == j ? 1.0L : 0.0L) - sq[static_cast<std::size_t>(i)] *
                                       k(xs[static_cast<std::size_t>(i)], xs[static_cast<std::size_t>(j)]) *
                                       sq[static_cast<std::size_t>(j)];
  return lu_det(mat);
}

}  // namespace detail

inline Real weighted_moment(const CDKernel& k, long deg, const IntervalList& pieces) {
  Real total = 0.0L;
  for (const auto& [a, b] : pieces.parts)
    total += integrate_adaptive(
        [&](Real z) { return std::pow(z, static_cast<Real>(deg)) * k.weight(z); }, a, b, 1e-15L);
  return total;
}

// gap probability as a ratio of moment determinants over the complement
inline Real gap_probability_hankel(const CDKernel& k, const IntervalList& gap_set) {
  auto [mlo, mhi] = detail::moment_safe_box(k);
  IntervalList inside = gap_set.clipped(mlo, mhi);
  IntervalList outside = inside.complement(mlo, mhi);
  long n = k.order();
  auto hankel = [&](const IntervalList& set) {
    std::vector<Real> mom(static_cast<std::size_t>(2 * n - 1));
    for (long d = 0; d <= 2 * n - 2; ++d)
      mom[static_cast<std::size_t>(d)] = weighted_moment(k, d, set);
    std::vector<std::vector<Real>> h(static_cast<std::size_t>(n),
                                     std::vector<Real>(static_cast<std::size_t>(n)));
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < n; ++j)
        h[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            mom[static_cast<std::size_t>(i + j)];
    return detail::lu_det(h);
  };
  IntervalList full;
  full.parts.push_back({mlo, mhi});
  Real denom = hankel(full);
  if (denom == 0.0L) throw numeric_error("gap_probability_hankel: degenerate moment matrix");
  return hankel(outside) / denom;
}

inline Real gap_probability_nystrom(const CDKernel& k, const IntervalList& gap_set,
                                    DetDiagnostics* diag = nullptr, long max_nodes = 640) {
  auto [dlo, dhi] = detail::diagonal_safe_box(k);
  IntervalList pieces = gap_set.clipped(dlo, dhi);
  if (pieces.empty()) {
    if (diag) *diag = DetDiagnostics{0, 0, 0.0L, 0.0L};
    return 1.0L;
  }
  Real prev = detail::nystrom_det_at(k, pieces, 40);
  for (long m = 80; m <= max_nodes; m *= 2) {
    Real cur = detail::nystrom_det_at(k, pieces, m);
    if (std::fabs(cur - prev) < 1e-10L) {
      if (diag) {
        diag->truncation = static_cast<long>(pieces.parts.size());
        diag->nodes = m;
        diag->est_error = std::fabs(cur - prev);
        diag->imag_residue = 0.0L;
      }
      return cur;
    }
    prev = cur;
  }
  throw numeric_error("gap_probability_nystrom: determinant did not stabilize");
}

// both routes, cross-checked
inline Real gap_probability(const CDKernel& k, const IntervalList& gap_set,
                            DetDiagnostics* diag = nullptr, long max_nodes = 640) {
  Real ny = gap_probability_nystrom(k, gap_set, diag, max_nodes);
  Real hk = gap_probability_hankel(k, gap_set);
  if (std::fabs(ny - hk) > 1e-8L)
    throw numeric_error("gap_probability: quadrature and moment routes disagree");
  return ny;
}

struct ReproducingReport {
  Real trace = 0.0L;
  Real defect = 0.0L;
};

// trace should equal the order; the defect measures failure of K o K = K
inline ReproducingReport reproducing_check(const CDKernel& k, Real box_lo, Real box_hi,
                                           long grid = 7) {
  auto [dlo, dhi] = detail::diagonal_safe_box(k);
  ReproducingReport rep;
  rep.trace = integrate_adaptive([&](Real z) { return k.diagonal(z); }, dlo, dhi, 1e-14L);
  for (long i = 0; i < grid; ++i)
    for (long j = 0; j < grid; ++j) {
      Real y = box_lo + (box_hi - box_lo) * static_cast<Real>(i) / static_cast<Real>(grid - 1);
      Real z = box_lo + (box_hi - box_lo) * static_cast<Real>(j) / static_cast<Real>(grid - 1);
      Real conv = integrate_adaptive([&](Real u) { return k(y, u) * k(u, z); }, dlo, dhi, 1e-12L);
      rep.defect = std::max(rep.defect, std::fabs(conv - k(y, z)));
    }
  return rep;
}

}  // namespace rmt
