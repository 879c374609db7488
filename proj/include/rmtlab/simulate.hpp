#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rmtlab/cd_kernel.hpp"
#include "rmtlab/common.hpp"
#include "rmtlab/exact_laws.hpp"
#include "rmtlab/partition.hpp"
#include "rmtlab/quadrature.hpp"
#include "rmtlab/rng.hpp"
#include "rmtlab/rsk.hpp"

namespace rmt {

struct EmpiricalCdf {
  std::vector<Real> samples;  // sorted ascending
  long count = 0;

  explicit EmpiricalCdf(std::vector<Real> xs) : samples(std::move(xs)) {
    if (samples.empty()) throw std::invalid_argument("EmpiricalCdf: need at least one sample");
    std::sort(samples.begin(), samples.end());
    count = static_cast<long>(samples.size());
  }

  Real operator()(Real x) const {
    auto it = std::upper_bound(samples.begin(), samples.end(), x);
    return static_cast<Real>(it - samples.begin()) / static_cast<Real>(count);
  }

  // sup-distance to a reference distribution, probed at the jump points
  template <class F>
  Real ks_distance(F&& cdf) const {
    Real d = 0.0L;
    for (long i = 0; i < count; ++i) {
      Real f = cdf(samples[static_cast<std::size_t>(i)]);
      d = std::max(d, std::fabs(f - static_cast<Real>(i) / count));
      d = std::max(d, std::fabs(static_cast<Real>(i + 1) / count - f));
    }
    return d;
  }

  std::string to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "x,F\n";
    for (long i = 0; i < count; ++i) {
      std::size_t k = static_cast<std::size_t>(i);
      if (i + 1 < count && samples[k + 1] == samples[k]) continue;
      os << static_cast<double>(samples[k]) << ","
         << static_cast<double>(static_cast<Real>(i + 1) / count) << "\n";
    }
    return os.str();
  }
};

// ---------------------------------------------------------------------------
// samplers

inline std::vector<long> sample_permutation(long n, CounterRng& rng) {
  if (n < 0) throw std::invalid_argument("sample_permutation: n must be >= 0");
  std::vector<long> a(static_cast<std::size_t>(n));
  std::iota(a.begin(), a.end(), 1L);
  for (long i = n - 1; i >= 1; --i)
    std::swap(a[static_cast<std::size_t>(i)],
              a[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i + 1)))]);
  return a;
}

inline std::vector<long> sample_word(long n, long q, CounterRng& rng) {
  if (n < 0 || q < 1) throw std::invalid_argument("sample_word: need n >= 0 and q >= 1");
  std::vector<long> w(static_cast<std::size_t>(n));
  for (auto& x : w) x = 1 + static_cast<long>(rng.below(static_cast<std::uint64_t>(q)));
  return w;
}

inline std::vector<std::vector<long>> sample_geometric_matrix(long p, long q, Real xi,
                                                              CounterRng& rng) {
  if (p < 1 || q < 1) throw std::invalid_argument("sample_geometric_matrix: need p,q >= 1");
  if (!(xi > 0.0L && xi < 1.0L))
    throw std::invalid_argument("sample_geometric_matrix: xi must lie in (0,1)");
  std::vector<std::vector<long>> w(static_cast<std::size_t>(p),
                                   std::vector<long>(static_cast<std::size_t>(q)));
  for (auto& row : w)
    for (auto& x : row) x = rng.geometric(static_cast<double>(xi));
  return w;
}

inline std::vector<std::vector<Real>> sample_exponential_matrix(long p, long q, CounterRng& rng) {
  if (p < 1 || q < 1) throw std::invalid_argument("sample_exponential_matrix: need p,q >= 1");
  std::vector<std::vector<Real>> w(static_cast<std::size_t>(p),
                                   std::vector<Real>(static_cast<std::size_t>(q)));
  for (auto& row : w)
    for (auto& x : row) x = static_cast<Real>(rng.exponential());
  return w;
}

// ---------------------------------------------------------------------------
// tandem queue

// Departure time of the last customer through q servers fed by p customers:
// D(i,j) = max(D(i-1,j), D(i,j-1)) + V(i,j) with empty boundary
// D(i,0) = D(0,j) = 0.
template <class T>
T queue_departure(const std::vector<std::vector<T>>& v) {
  if (v.empty() || v[0].empty()) throw std::invalid_argument("queue_departure: empty matrix");
  std::size_t p = v.size(), q = v[0].size();
  std::vector<std::vector<T>> dtab(p + 1, std::vector<T>(q + 1, T(0)));
  for (std::size_t i = 1; i <= p; ++i) {
    if (v[i - 1].size() != q) throw std::invalid_argument("queue_departure: ragged matrix");
    for (std::size_t j = 1; j <= q; ++j) {
      if (v[i - 1][j - 1] < T(0))
        throw std::invalid_argument("queue_departure: service times must be nonnegative");
      dtab[i][j] = std::max(dtab[i - 1][j], dtab[i][j - 1]) + v[i - 1][j - 1];
    }
  }
  return dtab[p][q];
}

// ---------------------------------------------------------------------------
// polynuclear growth

// Nucleation field omega(x,t) on 1 <= t <= t_max, |x| <= t_max. Deposits may
// occupy only sites with t - x odd and |x| <= t.
struct PngField {
  long t_max = 0;
  std::vector<std::vector<long>> w;  // w[t-1][x + t_max]

  PngField() = default;
  explicit PngField(long tm) : t_max(tm) {
    if (tm < 0) throw std::invalid_argument("PngField: negative horizon");
    w.assign(static_cast<std::size_t>(tm),
             std::vector<long>(static_cast<std::size_t>(2 * tm + 1), 0));
  }

  long omega(long x, long t) const {
    if (t < 1 || t > t_max || x < -t_max || x > t_max) return 0;
    return w[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(x + t_max)];
  }

  void set(long x, long t, long value) {
    if (t < 1 || t > t_max || x < -t_max || x > t_max)
      throw std::invalid_argument("PngField::set: site outside storage");
    w[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(x + t_max)] = value;
  }

  void validate() const {
    for (long t = 1; t <= t_max; ++t)
      for (long x = -t_max; x <= t_max; ++x)
        if (omega(x, t) != 0 && ((t - x) % 2 == 0 || std::labs(x) > t))
          throw std::invalid_argument("png field: deposit off the allowed sublattice");
  }
};

inline PngField sample_png_field(long t_max, Real xi, CounterRng& rng) {
  PngField f(t_max);
  for (long t = 1; t <= t_max; ++t)
    for (long x = -t; x <= t; ++x)
      if ((t - x) % 2 != 0) f.set(x, t, rng.geometric(static_cast<double>(xi)));
  return f;
}

// Height after running the deposition recursion to time t:
// h(x, s+1) = max(h(x-1,s), h(x,s), h(x+1,s)) + omega(x, s+1), h(., 0) = 0.
inline long png_height(long x, long t, const PngField& f, bool check = true) {
  if (t < 0 || t > f.t_max) throw std::invalid_argument("png_height: time outside field horizon");
  if (check) f.validate();
  long r = f.t_max + 1;  // heights vanish beyond |x| = t, so this border stays 0
  std::vector<long> h(static_cast<std::size_t>(2 * r + 1), 0), nh(h);
  for (long s = 0; s < t; ++s) {
    for (long xx = -r; xx <= r; ++xx) {
      long best = h[static_cast<std::size_t>(xx + r)];
      if (xx - 1 >= -r) best = std::max(best, h[static_cast<std::size_t>(xx - 1 + r)]);
      if (xx + 1 <= r) best = std::max(best, h[static_cast<std::size_t>(xx + 1 + r)]);
      nh[static_cast<std::size_t>(xx + r)] = best + f.omega(xx, s + 1);
    }
    h.swap(nh);
  }
  if (x < -r || x > r) return 0;
  return h[static_cast<std::size_t>(x + r)];
}

// ---------------------------------------------------------------------------
// GUE

// Entries follow the invariant density e^{-Tr H^2}: diagonal N(0, 1/2),
// off-diagonal real and imaginary parts N(0, 1/4). Draw order: diagonal
// first, then the upper triangle row-major, real part before imaginary.
inline std::vector<Real> sample_gue(long n, CounterRng& rng) {
  if (n < 1) throw std::invalid_argument("sample_gue: n must be >= 1");
  Eigen::MatrixXcd h(n, n);
  const double inv_sqrt2 = 0.70710678118654752440;
  for (long i = 0; i < n; ++i) h(i, i) = rng.normal() * inv_sqrt2;
  for (long i = 0; i < n; ++i)
    for (long j = i + 1; j < n; ++j) {
      double re = rng.normal() * 0.5;
      double im = rng.normal() * 0.5;
      h(i, j) = std::complex<double>(re, im);
      h(j, i) = std::complex<double>(re, -im);
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw numeric_error("sample_gue: eigensolver failed");
  std::vector<Real> z(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
  std::sort(z.begin(), z.end());
  return z;
}

inline Real edge_rescale(const std::vector<Real>& eigs, long n) {
  if (eigs.empty() || n < 1) throw std::invalid_argument("edge_rescale: need eigenvalues");
  return std::sqrt(2.0L) * std::pow(static_cast<Real>(n), 1.0L / 6.0L) *
         (eigs.back() - std::sqrt(2.0L * static_cast<Real>(n)));
}

// ---------------------------------------------------------------------------
// equilibrium densities

inline Real semicircle_density(Real z, Real v) {
  if (!(v > 0.0L)) throw std::invalid_argument("semicircle_density: v must be positive");
  const Real pi = 3.14159265358979323846264338327950288L;
  Real s = 4.0L * v * v - z * z;
  if (s <= 0.0L) return 0.0L;
  return std::sqrt(s) / (2.0L * pi * v * v);
}

// Equilibrium density for the Gaussian ensemble with external source having
// atoms alpha (weight p) and beta (weight 1-p). g = f + z solves
//   g^3 - (z+a+b) g^2 + (z(a+b) + ab + 1) g - abz - (1-p)a - pb = 0
// and the density is Im g / pi, supported exactly where the cubic
// discriminant is negative (one real root plus a conjugate pair).
inline Real two_atom_equilibrium(Real z, Real alpha, Real beta, Real p) {
  if (!(p > 0.0L && p < 1.0L))
    throw std::invalid_argument("two_atom_equilibrium: p must lie in (0,1)");
  const Real pi = 3.14159265358979323846264338327950288L;
  Real b = -(z + alpha + beta);
  Real c = z * (alpha + beta) + alpha * beta + 1.0L;
  Real d = -alpha * beta * z - (1.0L - p) * alpha - p * beta;
  Real disc = 18.0L * b * c * d - 4.0L * b * b * b * d + b * b * c * c - 4.0L * c * c * c -
              27.0L * d * d;
  if (disc >= 0.0L) return 0.0L;
  // depressed form t^3 + bigp t + bigq with g = t - b/3
  Real bigp = c - b * b / 3.0L;
  Real bigq = (2.0L * b * b * b - 9.0L * b * c) / 27.0L + d;
  Real rad = std::sqrt(-disc / 108.0L);  // = sqrt(bigq^2/4 + bigp^3/27)
  Real r = std::cbrt(-bigq / 2.0L + rad) + std::cbrt(-bigq / 2.0L - rad);
  for (int it = 0; it < 3; ++it) {
    Real fp = 3.0L * r * r + bigp;
    if (fp == 0.0L) break;
    r -= ((r * r + bigp) * r + bigq) / fp;
  }
  // factor out the real root: the pair solves t^2 + r t + (bigp + r^2)
  Real im2 = 4.0L * bigp + 3.0L * r * r;
  if (im2 <= 0.0L) return 0.0L;
  return std::sqrt(im2) / (2.0L * pi);
}

// ---------------------------------------------------------------------------
// limit shape

// Boundary of the Young diagram in rotated coordinates u = x - y, v = x + y:
// at integer u the height is u + 2 #{i >= 1 : lambda_i - i >= u} (rows padded
// with zeros), and the profile is linear between integers.
inline long shape_profile_int(const Partition& l, long u) {
  long len = static_cast<long>(l.length());
  long count = 0;
  for (long i = 1; i <= len; ++i) {
    if (l.parts[static_cast<std::size_t>(i - 1)] - i >= u)
      ++count;
    else
      break;  // lambda_i - i is strictly decreasing
  }
  if (-u > len) count += -u - len;
  return u + 2 * count;
}

inline Real shape_profile(const Partition& l, Real u) {
  Real fl = std::floor(u);
  long lo = static_cast<long>(fl);
  if (u == fl) return static_cast<Real>(shape_profile_int(l, lo));
  Real frac = u - fl;
  return (1.0L - frac) * static_cast<Real>(shape_profile_int(l, lo)) +
         frac * static_cast<Real>(shape_profile_int(l, lo + 1));
}

inline Real shape_sup_deviation(const Partition& l, long n) {
  Real rt = std::sqrt(static_cast<Real>(n));
  Real umax = std::max(2.0L, std::max(static_cast<Real>(l.part(1)) / rt,
                                      static_cast<Real>(l.length()) / rt));
  long steps = static_cast<long>(std::ceil(umax / 0.05L)) + 2;
  Real sup = 0.0L;
  for (long k = -steps; k <= steps; ++k) {
    Real u = 0.05L * static_cast<Real>(k);
    sup = std::max(sup, std::fabs(shape_profile(l, u * rt) / rt - omega_curve(u)));
  }
  return sup;
}

// Mean over RSK shapes of uniform permutations of the sup-distance between
// the rescaled profile and the limit curve, probed on a u-grid of step 0.05.
inline Real shape_deviation(long n, long samples, CounterRng& rng) {
  if (n < 4) throw std::invalid_argument("shape_deviation: n must be >= 4");
  if (samples < 1) throw std::invalid_argument("shape_deviation: samples must be >= 1");
  Real acc = 0.0L;
  for (long s = 0; s < samples; ++s) {
    Partition shape = rsk(biword_from_permutation(sample_permutation(n, rng))).shape();
    acc += shape_sup_deviation(shape, n);
  }
  return acc / static_cast<Real>(samples);
}

// ---------------------------------------------------------------------------
// soft-edge window at fixed q

// Exact percolation law in the window ell = xi p/(1-xi) + y sqrt(xi p)/(1-xi)
// against the q-point Gaussian box probability; both sides reported. The
// Jacobian-squared integral reduces to a Hankel determinant of truncated
// moments m_k(y) = int_{-inf}^{y} x^k e^{-x^2/2} dx.
inline std::pair<Real, Real> finite_q_limit_check(long q, long p, Real xi, Real y) {
  if (q < 1 || p < 1) throw std::invalid_argument("finite_q_limit_check: need p,q >= 1");
  if (!(xi > 0.0L && xi < 1.0L))
    throw std::invalid_argument("finite_q_limit_check: xi must lie in (0,1)");
  Real center = xi * static_cast<Real>(p) / (1.0L - xi);
  Real scale = std::sqrt(xi * static_cast<Real>(p)) / (1.0L - xi);
  Real threshold = center + y * scale;
  Real lhs = 0.0L;
  if (threshold >= 0.0L)
    lhs = geometric_lpp_cdf(p, q, xi, static_cast<long>(std::floor(threshold)));

  const Real cut = 12.0L;  // Gaussian mass beyond is ~ e^{-72}
  auto moment = [&](long k, Real hi) -> Real {
    if (hi <= -cut) return 0.0L;
    return integrate_adaptive(
        [k](Real x) { return std::pow(x, static_cast<Real>(k)) * std::exp(-x * x / 2.0L); },
        -cut, std::min(hi, cut), 1e-12L);
  };
  auto hankel = [&](Real hi) -> Real {
    std::vector<Real> m(static_cast<std::size_t>(2 * q - 1));
    for (long k = 0; k <= 2 * q - 2; ++k) m[static_cast<std::size_t>(k)] = moment(k, hi);
    std::vector<std::vector<Real>> a(static_cast<std::size_t>(q),
                                     std::vector<Real>(static_cast<std::size_t>(q)));
    for (long i = 0; i < q; ++i)
      for (long j = 0; j < q; ++j)
        a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            m[static_cast<std::size_t>(i + j)];
    return detail::lu_det(a);
  };
  Real rhs = hankel(y) / hankel(cut);
  return {lhs, rhs};
}

// Asymptotic pile-count prediction 2 sqrt(n) + n^{1/6} m with m the soft-edge
// mean; the default is the five-digit constant quoted with the law.
inline Real patience_pile_prediction(long n, Real edge_mean = -1.77109L) {
  if (n < 1) throw std::invalid_argument("patience_pile_prediction: n must be >= 1");
  return 2.0L * std::sqrt(static_cast<Real>(n)) +
         std::pow(static_cast<Real>(n), 1.0L / 6.0L) * edge_mean;
}

// ---------------------------------------------------------------------------
// trial drivers and summaries

// One trial per stream: trial t draws from {seed, stream + t}, so the sample
// set is independent of chunking and thread count.
template <class F>
std::vector<Real> mc_samples(long trials, RngConfig base, F&& trial_fn) {
  if (trials < 1) throw std::invalid_argument("mc_samples: trials must be >= 1");
  std::vector<Real> out(static_cast<std::size_t>(trials));
  parallel_map_reduce<int>(
      trials, 64, 0,
      [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t t = lo; t < hi; ++t) {
          CounterRng rng(RngConfig{base.seed, base.stream + static_cast<std::uint64_t>(t)});
          out[static_cast<std::size_t>(t)] = trial_fn(rng);
        }
        return 0;
      },
      [](int a, int) { return a; });
  return out;
}

template <class F>
EmpiricalCdf mc_cdf(long trials, RngConfig base, F&& trial_fn) {
  return EmpiricalCdf(mc_samples(trials, base, std::forward<F>(trial_fn)));
}

struct SampleSummary {
  std::string model;
  std::vector<std::pair<std::string, Real>> params;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  long n_samples = 0;
  std::vector<std::pair<std::string, Real>> statistics;

  std::string to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\"model\":\"" << model << "\",\"params\":{";
    for (std::size_t i = 0; i < params.size(); ++i)
      os << (i ? "," : "") << "\"" << params[i].first
         << "\":" << static_cast<double>(params[i].second);
    os << "},\"seed\":" << seed << ",\"stream\":" << stream << ",\"n_samples\":" << n_samples
       << ",\"statistics\":{";
    for (std::size_t i = 0; i < statistics.size(); ++i)
      os << (i ? "," : "") << "\"" << statistics[i].first
         << "\":" << static_cast<double>(statistics[i].second);
    os << "}}";
    return os.str();
  }
};

}  // namespace rmt
