#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rmtlab/cd_kernel.hpp"
#include "rmtlab/common.hpp"
#include "rmtlab/quadrature.hpp"
#include "rmtlab/rational.hpp"

namespace rmt {

// Hankel determinants of deformed moment matrices, the orthogonal-polynomial
// recurrence they generate, and numerical residuals of the nonlinear
// identities those determinants satisfy (first lattice equation, boundary
// constraints, third-order gap-probability ODEs).

enum class TauWeight { gauss, laguerre, jacobi };

// Moment matrix context: weight family with parameters, restriction domain,
// matrix order n, and polynomial exponential deformation times t_1..t_4.
struct TauContext {
  TauWeight family = TauWeight::gauss;
  Real a = 0.0L;
  Real b = 0.0L;
  long n = 1;
  IntervalList domain;
  std::array<Real, 4> t{0.0L, 0.0L, 0.0L, 0.0L};
};

inline IntervalList full_domain() {
  const Real inf = std::numeric_limits<Real>::infinity();
  return IntervalList::normalized({{-inf, inf}});
}

inline TauContext make_tau_context(TauWeight family, long n, Real a = 0.0L, Real b = 0.0L) {
  TauContext c;
  c.family = family;
  c.a = a;
  c.b = b;
  c.n = n;
  c.domain = full_domain();
  return c;
}

namespace detail {

inline std::pair<Real, Real> tau_support(TauWeight f) {
  const Real inf = std::numeric_limits<Real>::infinity();
  switch (f) {
    case TauWeight::gauss:
      return {-inf, inf};
    case TauWeight::laguerre:
      return {0.0L, inf};
    case TauWeight::jacobi:
      return {-1.0L, 1.0L};
  }
  throw std::invalid_argument("tau_support: unknown family");
}

// finite evaluation box; unbounded weights are cut where they are far below
// the moment tolerance, and tau_guard rejects deformations that would make
// the cut matter
inline std::pair<Real, Real> tau_box(TauWeight f) {
  switch (f) {
    case TauWeight::gauss:
      return {-9.0L, 9.0L};
    case TauWeight::laguerre:
      return {0.0L, 120.0L};
    case TauWeight::jacobi:
      return {-1.0L, 1.0L};
  }
  throw std::invalid_argument("tau_box: unknown family");
}

inline void tau_validate(const TauContext& c) {
  if (c.n < 0) throw std::invalid_argument("tau: order must be nonnegative");
  if (c.family == TauWeight::laguerre && c.a <= -1.0L)
    throw std::invalid_argument("tau: laguerre exponent must exceed -1");
  if (c.family == TauWeight::jacobi && (c.a <= -1.0L || c.b <= -1.0L))
    throw std::invalid_argument("tau: jacobi exponents must exceed -1");
}

inline Real tau_log_base_weight(const TauContext& c, Real z) {
  switch (c.family) {
    case TauWeight::gauss:
      return -z * z;
    case TauWeight::laguerre:
      return (c.a == 0.0L ? 0.0L : c.a * std::log(z)) - z;
    case TauWeight::jacobi:
      return (c.a == 0.0L ? 0.0L : c.a * std::log(1.0L - z)) +
             (c.b == 0.0L ? 0.0L : c.b * std::log(1.0L + z));
  }
  throw std::invalid_argument("tau: unknown family");
}

inline Real tau_deformation(const TauContext& c, Real z) {
  return ((c.t[3] * z + c.t[2]) * z + c.t[1]) * z * z + c.t[0] * z;
}

// domain clipped to the support; empty result marks a degenerate context
inline IntervalList tau_effective_domain(const TauContext& c) {
  auto [lo, hi] = tau_support(c.family);
  return c.domain.clipped(lo, hi);
}

// The deformation exponential is only meaningful while the evaluation box
// dominates it: if the deformed integrand at a cut edge is not negligible
// next to the moment tolerance, the regularized value would depend on the
// cut, so refuse. A positive quartic time on an unbounded domain is refused
// outright; it has no decaying side to lean on.
inline void tau_guard(const TauContext& c, long top_degree) {
  IntervalList eff = tau_effective_domain(c);
  auto [blo, bhi] = tau_box(c.family);
  bool cut_low = false, cut_high = false;
  for (const auto& [lo, hi] : eff.parts) {
    if (lo < blo) cut_low = true;
    if (hi > bhi) cut_high = true;
  }
  if (!cut_low && !cut_high) return;
  if (c.t[3] > 0.0L) throw numeric_error("tau: positive quartic time diverges off the box");
  auto edge_mass = [&](Real z) {
    return tau_log_base_weight(c, z) + tau_deformation(c, z) +
           static_cast<Real>(top_degree) * std::log(1.0L + std::fabs(z));
  };
  if (cut_low && edge_mass(blo) > -30.0L)
    throw numeric_error("tau: deformation is not negligible at the lower cut");
  if (cut_high && edge_mass(bhi) > -30.0L)
    throw numeric_error("tau: deformation is not negligible at the upper cut");
}

// piece integral for the deformed weight; jacobi pieces go through the sine
// substitution so fractional endpoint exponents stay resolvable
template <typename F>
Real tau_integrate(TauWeight fam, const F& f, Real lo, Real hi, Real tol, long n0 = 32) {
  if (fam == TauWeight::jacobi) {
    const Real half_pi = 1.57079632679489661923L;
    Real mid = 0.5L * (lo + hi), half = 0.5L * (hi - lo);
    return integrate_adaptive(
        [&](Real th) { return f(mid + half * std::sin(th)) * half * std::cos(th); }, -half_pi,
        half_pi, tol, n0);
  }
  return integrate_adaptive(f, lo, hi, tol, n0);
}

// mu_k = integral of z^k rho(z) exp(sum t_i z^i) over the domain, k < count;
// one quadrature task per moment
inline std::vector<Real> tau_moments(const TauContext& c, long count) {
  tau_validate(c);
  tau_guard(c, count + 1);
  auto [blo, bhi] = tau_box(c.family);
  IntervalList pieces = tau_effective_domain(c).clipped(blo, bhi);
  std::vector<Real> mu(static_cast<std::size_t>(count), 0.0L);
  if (pieces.empty()) return mu;
  parallel_map_reduce<int>(
      count, 1, 0,
      [&](long klo, long khi) {
        for (long k = klo; k < khi; ++k) {
          Real s = 0.0L;
          for (const auto& [lo, hi] : pieces.parts)
            s += tau_integrate(
                c.family,
                [&](Real z) {
                  return std::pow(z, static_cast<Real>(k)) *
                         std::exp(tau_log_base_weight(c, z) + tau_deformation(c, z));
                },
                lo, hi, 1e-13L);
          mu[static_cast<std::size_t>(k)] = s;
        }
        return 0;
      },
      [](int acc, int) { return acc; });
  return mu;
}

inline Real hankel_det(const std::vector<Real>& mu, long n) {
  if (n == 0) return 1.0L;
  std::vector<std::vector<Real>> m(static_cast<std::size_t>(n),
                                   std::vector<Real>(static_cast<std::size_t>(n)));
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j)
      m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          mu[static_cast<std::size_t>(i + j)];
  return lu_det(m);
}

}  // namespace detail

inline bool tau_degenerate(const TauContext& c) {
  detail::tau_validate(c);
  return detail::tau_effective_domain(c).empty();
}

// determinant of the n x n deformed moment matrix (mu_{i+j})
inline Real tau(const TauContext& c) {
  detail::tau_validate(c);
  if (c.n == 0) return 1.0L;
  if (tau_degenerate(c)) return 0.0L;
  return detail::hankel_det(detail::tau_moments(c, 2 * c.n - 1), c.n);
}

// monic orthogonal polynomial of degree n for the deformed weight, as the
// moment determinant bordered by the power column, over tau_n; the batch
// form shares one moment computation across all evaluation points
inline std::vector<Real> monic_orthopoly_values(const TauContext& c,
                                                const std::vector<Real>& zs) {
  detail::tau_validate(c);
  if (c.n == 0) return std::vector<Real>(zs.size(), 1.0L);
  std::vector<Real> mu = detail::tau_moments(c, 2 * c.n);
  Real tn = detail::hankel_det(mu, c.n);
  if (tn == 0.0L || !std::isfinite(tn))
    throw numeric_error("monic_orthopoly: singular moment matrix");
  long n = c.n;
  std::vector<Real> out;
  out.reserve(zs.size());
  for (Real z : zs) {
    std::vector<std::vector<Real>> bordered(
        static_cast<std::size_t>(n + 1), std::vector<Real>(static_cast<std::size_t>(n + 1)));
    for (long i = 0; i <= n; ++i) {
      for (long j = 0; j < n; ++j)
        bordered[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            mu[static_cast<std::size_t>(i + j)];
      bordered[static_cast<std::size_t>(i)][static_cast<std::size_t>(n)] =
          std::pow(z, static_cast<Real>(i));
    }
    out.push_back(detail::lu_det(bordered) / tn);
  }
  return out;
}

inline Real monic_orthopoly(const TauContext& c, Real z) {
  return monic_orthopoly_values(c, {z})[0];
}

// Finite-difference plumbing: step sizes, extrapolation depth, and the
// largest acceptable self-estimated error.
struct StencilSpec {
  std::array<Real, 4> t_step{1e-2L, 1e-2L, 1e-2L, 1e-2L};
  Real c_step = 1e-3L;
  Real x_step = 0.0L;  // 0 picks a family default for the gap-table grids
  int richardson_levels = 3;
  int table_order = 8;
  Real max_error = 1e-3L;
};

namespace detail {

inline void stencil_validate(const StencilSpec& s) {
  for (Real h : s.t_step)
    if (!(h > 0.0L)) throw std::invalid_argument("stencil: time steps must be positive");
  if (!(s.c_step > 0.0L)) throw std::invalid_argument("stencil: endpoint step must be positive");
  if (s.x_step < 0.0L) throw std::invalid_argument("stencil: grid step must be nonnegative");
  if (s.richardson_levels < 2 || s.richardson_levels > 4)
    throw std::invalid_argument("stencil: extrapolation needs 2 to 4 levels");
  if (s.table_order < 2 || s.table_order > 8 || s.table_order % 2 != 0)
    throw std::invalid_argument("stencil: table order must be even, at most 8");
  if (!(s.max_error > 0.0L)) throw std::invalid_argument("stencil: max_error must be positive");
}

// Richardson table in h^2 over values sampled at h * 2^j; returns the
// extrapolated value and the last diagonal correction as error estimate
inline std::pair<Real, Real> richardson(const std::vector<Real>& levels) {
  std::vector<Real> diag = levels;
  std::size_t m = diag.size();
  Real prev = diag[0];
  Real corr = 0.0L;
  Real factor = 4.0L;
  for (std::size_t stage = 1; stage < m; ++stage) {
    for (std::size_t i = 0; i + stage < m; ++i)
      diag[i] = (factor * diag[i] - diag[i + 1]) / (factor - 1.0L);
    factor *= 4.0L;
    corr = std::fabs(diag[0] - prev);
    prev = diag[0];
  }
  return {diag[0], corr};
}

}  // namespace detail

struct TodaEntries {
  Real a = 0.0L;  // off-diagonal entry at row n
  Real b = 0.0L;  // diagonal entry at row n
};

// lattice entries from determinant ratios: b_n as the first-time derivative
// of log(tau_{n+1}/tau_n), a_n as sqrt(tau_n tau_{n+2})/tau_{n+1}
inline TodaEntries toda_entries(const TauContext& c, const StencilSpec& spec = {}) {
  detail::tau_validate(c);
  detail::stencil_validate(spec);
  TauContext work = c;
  auto log_ratio = [&](Real t1) {
    work.t[0] = c.t[0] + t1;
    work.n = c.n + 1;
    Real hi = tau(work);
    work.n = c.n;
    Real lo = tau(work);
    if (!(hi > 0.0L) || !(lo > 0.0L)) throw numeric_error("toda_entries: nonpositive tau");
    return std::log(hi) - std::log(lo);
  };
  Real h = spec.t_step[0];
  std::vector<Real> levels;
  for (int j = 0; j < spec.richardson_levels; ++j) {
    Real hj = h * static_cast<Real>(1 << j);
    levels.push_back((log_ratio(hj) - log_ratio(-hj)) / (2.0L * hj));
  }
  TodaEntries out;
  out.b = detail::richardson(levels).first;
  work.t[0] = c.t[0];
  work.n = c.n;
  Real tn = tau(work);
  work.n = c.n + 1;
  Real tn1 = tau(work);
  work.n = c.n + 2;
  Real tn2 = tau(work);
  if (!(tn > 0.0L) || !(tn1 > 0.0L) || !(tn2 > 0.0L))
    throw numeric_error("toda_entries: nonpositive tau");
  out.a = std::sqrt(tn * tn2) / tn1;
  return out;
}

// the same entries from orthogonality: b_n = <z p_n, p_n>/h_n and
// a_n = sqrt(h_{n+1}/h_n) with h_n = <p_n, p_n> for the monic polynomials
inline TodaEntries recurrence_entries(const TauContext& c) {
  detail::tau_validate(c);
  long n = c.n;
  std::vector<Real> mu = detail::tau_moments(c, 2 * n + 3);
  std::vector<Real> taus(static_cast<std::size_t>(n + 3));
  for (long m = 0; m <= n + 2; ++m) taus[static_cast<std::size_t>(m)] = detail::hankel_det(mu, m);
  auto poly = [&](long deg, Real z) {
    if (deg == 0) return 1.0L;
    std::vector<std::vector<Real>> bordered(
        static_cast<std::size_t>(deg + 1), std::vector<Real>(static_cast<std::size_t>(deg + 1)));
    for (long i = 0; i <= deg; ++i) {
      for (long j = 0; j < deg; ++j)
        bordered[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            mu[static_cast<std::size_t>(i + j)];
      bordered[static_cast<std::size_t>(i)][static_cast<std::size_t>(deg)] =
          std::pow(z, static_cast<Real>(i));
    }
    return detail::lu_det(bordered) / taus[static_cast<std::size_t>(deg)];
  };
  auto [blo, bhi] = detail::tau_box(c.family);
  IntervalList pieces = detail::tau_effective_domain(c).clipped(blo, bhi);
  if (pieces.empty()) throw numeric_error("recurrence_entries: degenerate domain");
  auto pair_integral = [&](long dl, long dr, bool with_z) {
    Real s = 0.0L;
    for (const auto& [lo, hi] : pieces.parts)
      s += detail::tau_integrate(
          c.family,
          [&](Real z) {
            Real w = std::exp(detail::tau_log_base_weight(c, z) + detail::tau_deformation(c, z));
            return (with_z ? z : 1.0L) * poly(dl, z) * poly(dr, z) * w;
          },
          lo, hi, 1e-12L);
    return s;
  };
  Real hn = pair_integral(n, n, false);
  Real hn1 = pair_integral(n + 1, n + 1, false);
  if (!(hn > 0.0L) || !(hn1 > 0.0L)) throw numeric_error("recurrence_entries: nonpositive norm");
  TodaEntries out;
  out.b = pair_integral(n, n, true) / hn;
  out.a = std::sqrt(hn1 / hn);
  return out;
}

// Residual value with a self-estimate of the stencil error, plus the context
// echo used by the JSON report.
struct ResidualReport {
  std::string check;
  std::string family;
  long n = 0;
  std::vector<std::pair<std::string, Real>> params;
  Real residual = 0.0L;
  Real error_estimate = 0.0L;

  std::string to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\"check\":\"" << check << "\",\"family\":\"" << family << "\",\"n\":" << n
       << ",\"params\":{";
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (i) os << ",";
      os << "\"" << params[i].first << "\":" << static_cast<double>(params[i].second);
    }
    os << "},\"residual\":" << static_cast<double>(residual)
       << ",\"error_estimate\":" << static_cast<double>(error_estimate) << "}";
    return os.str();
  }
};

namespace detail {

inline std::string tau_family_name(TauWeight f) {
  switch (f) {
    case TauWeight::gauss:
      return "gauss";
    case TauWeight::laguerre:
      return "laguerre";
    case TauWeight::jacobi:
      return "jacobi";
  }
  return "";
}

inline void require_zero_times(const TauContext& c, const char* who) {
  for (Real ti : c.t)
    if (ti != 0.0L) throw std::invalid_argument(std::string(who) + ": context times must be zero");
}

}  // namespace detail

// residual of the first lattice equation for log tau:
// d1^4 + 3 d2^2 - 4 d1 d3 applied to log tau, plus 6 (d1^2 log tau)^2
inline ResidualReport kp_residual(const TauContext& c, const StencilSpec& spec = {}) {
  detail::tau_validate(c);
  detail::stencil_validate(spec);
  detail::require_zero_times(c, "kp_residual");
  if (c.n < 1) throw std::invalid_argument("kp_residual: order must be positive");
  TauContext work = c;
  auto lt = [&](Real s1, Real s2, Real s3) {
    work.t = {s1, s2, s3, 0.0L};
    Real v = tau(work);
    if (!(v > 0.0L)) throw numeric_error("kp_residual: nonpositive tau");
    return std::log(v);
  };
  auto at_scale = [&](Real scale) {
    Real h1 = spec.t_step[0] * scale;
    Real h2 = spec.t_step[1] * scale;
    Real h3 = spec.t_step[2] * scale;
    Real c0 = lt(0.0L, 0.0L, 0.0L);
    Real p1 = lt(h1, 0, 0), m1 = lt(-h1, 0, 0);
    Real p2 = lt(2 * h1, 0, 0), m2 = lt(-2 * h1, 0, 0);
    Real d1111 = (p2 - 4 * p1 + 6 * c0 - 4 * m1 + m2) / (h1 * h1 * h1 * h1);
    Real d11 = (p1 - 2 * c0 + m1) / (h1 * h1);
    Real q1 = lt(0, h2, 0), q2 = lt(0, -h2, 0);
    Real d22 = (q1 - 2 * c0 + q2) / (h2 * h2);
    Real d13 = (lt(h1, 0, h3) - lt(h1, 0, -h3) - lt(-h1, 0, h3) + lt(-h1, 0, -h3)) /
               (4.0L * h1 * h3);
    return d1111 + 3.0L * d22 - 4.0L * d13 + 6.0L * d11 * d11;
  };
  std::vector<Real> levels;
  for (int j = 0; j < spec.richardson_levels; ++j)
    levels.push_back(at_scale(static_cast<Real>(1 << j)));
  auto [val, corr] = detail::richardson(levels);
  ResidualReport rep;
  rep.check = "kp";
  rep.family = detail::tau_family_name(c.family);
  rep.n = c.n;
  rep.params = {{"a", c.a}, {"b", c.b}};
  rep.residual = std::fabs(val);
  rep.error_estimate = std::max(corr, 1e-15L);
  if (rep.error_estimate > spec.max_error)
    throw numeric_error("kp_residual: stencil error estimate exceeds the requested bound");
  return rep;
}

namespace detail {

// endpoint-variation weight in the boundary operators: c^{k+1} times the
// leading coefficient polynomial of the weight family
inline Real boundary_coefficient(const TauContext& c, int k, Real endpoint) {
  Real base = std::pow(endpoint, static_cast<Real>(k + 1));
  switch (c.family) {
    case TauWeight::gauss:
      return base;
    case TauWeight::laguerre:
      return base * endpoint;
    case TauWeight::jacobi:
      return base * (1.0L - endpoint * endpoint);
  }
  return 0.0L;
}

// free finite endpoints of the effective domain, with their interval index
// and side (0 = lower, 1 = upper); endpoints sitting exactly on a hard
// support edge are excluded by the caller after checking their coefficient
struct DomainEndpoint {
  std::size_t part;
  int side;
  Real value;
};

inline std::vector<DomainEndpoint> finite_endpoints(const IntervalList& eff) {
  std::vector<DomainEndpoint> out;
  for (std::size_t i = 0; i < eff.parts.size(); ++i) {
    if (std::isfinite(eff.parts[i].first)) out.push_back({i, 0, eff.parts[i].first});
    if (std::isfinite(eff.parts[i].second)) out.push_back({i, 1, eff.parts[i].second});
  }
  return out;
}

}  // namespace detail

// residual at zero times of the k-th boundary constraint, k in {-1, 0, 1}:
// the pure time-derivative side minus the endpoint-variation side
inline ResidualReport virasoro_residual(const TauContext& c, int k,
                                        const StencilSpec& spec = {}) {
  detail::tau_validate(c);
  detail::stencil_validate(spec);
  detail::require_zero_times(c, "virasoro_residual");
  if (k < -1 || k > 1) throw std::invalid_argument("virasoro_residual: k must be -1, 0, or 1");
  if (c.n < 1) throw std::invalid_argument("virasoro_residual: order must be positive");
  IntervalList eff = detail::tau_effective_domain(c);
  if (eff.empty()) throw numeric_error("virasoro_residual: degenerate domain");
  auto [slo, shi] = detail::tau_support(c.family);

  TauContext work = c;
  auto log_tau = [&](const IntervalList& dom, std::array<Real, 4> t) {
    work.domain = dom;
    work.t = t;
    Real v = tau(work);
    if (!(v > 0.0L)) throw numeric_error("virasoro_residual: nonpositive tau");
    return std::log(v);
  };

  std::vector<detail::DomainEndpoint> ends = detail::finite_endpoints(eff);
  const Real n = static_cast<Real>(c.n);

  auto at_scale = [&](Real scale) {
    std::array<Real, 4> h{spec.t_step[0] * scale, spec.t_step[1] * scale,
                          spec.t_step[2] * scale, spec.t_step[3] * scale};
    Real hc = spec.c_step * scale;
    Real base = log_tau(eff, {0, 0, 0, 0});
    auto dt = [&](int i) {
      std::array<Real, 4> tp{0, 0, 0, 0}, tm{0, 0, 0, 0};
      tp[static_cast<std::size_t>(i)] = h[static_cast<std::size_t>(i)];
      tm[static_cast<std::size_t>(i)] = -h[static_cast<std::size_t>(i)];
      return (log_tau(eff, tp) - log_tau(eff, tm)) / (2.0L * h[static_cast<std::size_t>(i)]);
    };
    auto dt11 = [&]() {
      std::array<Real, 4> tp{h[0], 0, 0, 0}, tm{-h[0], 0, 0, 0};
      return (log_tau(eff, tp) - 2.0L * base + log_tau(eff, tm)) / (h[0] * h[0]);
    };
    auto dt12 = [&]() {
      auto shifted = [&](Real s1, Real s2) { return log_tau(eff, {s1, s2, 0, 0}); };
      return (shifted(h[0], h[1]) - shifted(h[0], -h[1]) - shifted(-h[0], h[1]) +
              shifted(-h[0], -h[1])) /
             (4.0L * h[0] * h[1]);
    };
    // endpoint variation: central difference in one endpoint of one part
    auto dc = [&](const detail::DomainEndpoint& e) {
      auto moved = [&](Real delta) {
        IntervalList dom = eff;
        auto& part = dom.parts[e.part];
        if (e.side == 0)
          part.first = e.value + delta;
        else
          part.second = e.value + delta;
        if (!(part.first < part.second))
          throw numeric_error("virasoro_residual: endpoint step collapses an interval");
        return log_tau(dom, {0, 0, 0, 0});
      };
      return (moved(hc) - moved(-hc)) / (2.0L * hc);
    };
    auto boundary = [&](int kk) {
      Real s = 0.0L;
      for (const auto& e : ends) {
        Real coef = detail::boundary_coefficient(c, kk, e.value);
        bool at_hard_edge = (e.value == slo || e.value == shi);
        if (at_hard_edge) {
          if (coef != 0.0L)
            throw numeric_error("virasoro_residual: endpoint variation at a hard edge");
          continue;
        }
        if (e.value - 2.0L * hc < slo || e.value + 2.0L * hc > shi)
          throw numeric_error("virasoro_residual: endpoint too close to the support edge");
        if (coef != 0.0L) s += coef * dc(e);
      }
      return s;
    };

    switch (c.family) {
      case TauWeight::gauss: {
        if (k == -1) return dt(0) + 0.5L * boundary(-1);
        if (k == 0) return dt(1) - 0.5L * n * n + 0.5L * boundary(0);
        return dt(2) + 0.5L * (boundary(1) + n * boundary(-1));
      }
      case TauWeight::laguerre: {
        Real s = 2.0L * n + c.a;
        if (k == -1) return dt(0) - n * (n + c.a) + boundary(-1);
        if (k == 0) return dt(1) - n * (n + c.a) * s + boundary(0) + s * boundary(-1);
        Real d1 = dt(0);
        return dt(2) - dt11() - d1 * d1 - n * (n + c.a) * s * s + boundary(1) +
               s * boundary(0) + s * s * boundary(-1);
      }
      case TauWeight::jacobi: {
        Real sig = 2.0L * n + c.a + c.b;
        Real b0 = c.a - c.b;
        if (k == -1) return sig * dt(0) + n * b0 + boundary(-1);
        if (k == 0) {
          Real d1 = dt(0);
          return sig * dt(1) + b0 * d1 + dt11() + d1 * d1 - n * n + boundary(0);
        }
        Real d1 = dt(0), d2 = dt(1);
        return sig * dt(2) + b0 * d2 - 2.0L * n * d1 + 2.0L * dt12() + 2.0L * d1 * d2 +
               boundary(1);
      }
    }
    throw std::invalid_argument("virasoro_residual: unknown family");
  };

  std::vector<Real> levels;
  for (int j = 0; j < spec.richardson_levels; ++j)
    levels.push_back(at_scale(static_cast<Real>(1 << j)));
  auto [val, corr] = detail::richardson(levels);
  ResidualReport rep;
  rep.check = "virasoro";
  rep.family = detail::tau_family_name(c.family);
  rep.n = c.n;
  rep.params = {{"a", c.a}, {"b", c.b}, {"k", static_cast<Real>(k)}};
  rep.residual = std::fabs(val);
  rep.error_estimate = std::max(corr, 1e-15L);
  if (rep.error_estimate > spec.max_error)
    throw numeric_error("virasoro_residual: stencil error estimate exceeds the requested bound");
  return rep;
}

// Which printed normalization of the constant triple (r, s, q) the
// hard-edge-free third-order ODE uses; `plain` is the consistent one.
enum class JacobiConstants { plain, scaled };

namespace detail {

// exact central finite-difference coefficients for derivative d at the
// minimal symmetric stencil achieving the requested even accuracy
inline std::vector<Real> central_coefficients(int d, int acc) {
  int pts = 2 * ((d + 1) / 2) - 1 + acc;
  int m = (pts - 1) / 2;
  std::vector<std::vector<Rational>> sys(
      static_cast<std::size_t>(pts), std::vector<Rational>(static_cast<std::size_t>(pts + 1), 0));
  for (int p = 0; p < pts; ++p) {
    for (int j = -m; j <= m; ++j) {
      Rational power = 1;
      for (int e = 0; e < p; ++e) power *= j;
      sys[static_cast<std::size_t>(p)][static_cast<std::size_t>(j + m)] = power;
    }
    sys[static_cast<std::size_t>(p)][static_cast<std::size_t>(pts)] =
        (p == d) ? Rational(factorial(static_cast<std::uint64_t>(d))) : Rational(0);
  }
  for (int col = 0; col < pts; ++col) {
    int piv = col;
    while (piv < pts && sys[static_cast<std::size_t>(piv)][static_cast<std::size_t>(col)] == 0)
      ++piv;
    if (piv == pts) throw numeric_error("central_coefficients: singular stencil system");
    std::swap(sys[static_cast<std::size_t>(col)], sys[static_cast<std::size_t>(piv)]);
    for (int r = 0; r < pts; ++r) {
      if (r == col) continue;
      Rational f = sys[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] /
                   sys[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
      if (f == 0) continue;
      for (int cc = col; cc <= pts; ++cc)
        sys[static_cast<std::size_t>(r)][static_cast<std::size_t>(cc)] -=
            f * sys[static_cast<std::size_t>(col)][static_cast<std::size_t>(cc)];
    }
  }
  std::vector<Real> out(static_cast<std::size_t>(pts));
  for (int i = 0; i < pts; ++i)
    out[static_cast<std::size_t>(i)] =
        to_real(Rational(sys[static_cast<std::size_t>(i)][static_cast<std::size_t>(pts)] /
                         sys[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)]));
  return out;
}

// log gap probabilities log P_n(max <= x) on an ascending grid, by
// accumulating incomplete moments slice by slice so the table is smooth
inline std::vector<Real> log_gap_table(TauWeight fam, long n, Real a, Real b,
                                       const std::vector<Real>& xs) {
  TauContext full = make_tau_context(fam, n, a, b);
  Real log_norm = std::log(tau(full));
  auto [blo, bhi] = tau_box(fam);
  auto [slo, shi] = tau_support(fam);
  long count = 2 * n - 1;
  std::vector<Real> mu(static_cast<std::size_t>(count), 0.0L);
  TauContext probe = full;
  auto accumulate = [&](Real lo, Real hi) {
    if (hi <= lo) return;
    for (long kdeg = 0; kdeg < count; ++kdeg)
      mu[static_cast<std::size_t>(kdeg)] += tau_integrate(
          fam,
          [&](Real z) {
            return std::pow(z, static_cast<Real>(kdeg)) *
                   std::exp(tau_log_base_weight(probe, z));
          },
          lo, hi, 1e-15L, 8);
  };
  std::vector<Real> out;
  out.reserve(xs.size());
  Real cursor = blo;
  for (Real x : xs) {
    if (x <= slo || x >= shi || x > bhi)
      throw std::invalid_argument("log_gap_table: grid point outside the open support");
    accumulate(cursor, x);
    cursor = std::max(cursor, x);
    Real det = hankel_det(mu, n);
    if (!(det > 0.0L)) throw numeric_error("log_gap_table: nonpositive restricted determinant");
    out.push_back(std::log(det) - log_norm);
  }
  return out;
}

struct GapOdeTerms {
  Real residual;
  Real scale;
};

// terms of the third-order ODE satisfied by the logarithmic derivative of
// the largest-eigenvalue law, per weight family
inline GapOdeTerms gap_ode_terms(TauWeight fam, long n, Real a, Real b, Real x, Real g1, Real g2,
                                 Real g3, Real g4, JacobiConstants jc) {
  Real nn = static_cast<Real>(n);
  auto combine = [](std::initializer_list<Real> terms) {
    Real sum = 0.0L, scale = 0.0L;
    for (Real t : terms) {
      sum += t;
      scale = std::max(scale, std::fabs(t));
    }
    return GapOdeTerms{sum, scale};
  };
  switch (fam) {
    case TauWeight::gauss: {
      Real f = g1, fp = g2, fpp2 = g3, fppp = g4;
      (void)fpp2;
      return combine({fppp, 6.0L * fp * fp, 4.0L * (2.0L * nn - x * x) * fp, 4.0L * x * f});
    }
    case TauWeight::laguerre: {
      Real f = x * g1;
      Real fp = x * g2 + g1;
      Real fpp = x * g3 + 2.0L * g2;
      Real fppp = x * g4 + 3.0L * g3;
      return combine({x * x * fppp, x * fpp, 6.0L * x * fp * fp, -4.0L * f * fp,
                      -((a - x) * (a - x) - 4.0L * nn * x) * fp, -(2.0L * nn + a - x) * f});
    }
    case TauWeight::jacobi: {
      Real u = 1.0L - x * x;
      Real f = u * g1;
      Real fp = u * g2 - 2.0L * x * g1;
      Real fpp = u * g3 - 4.0L * x * g2 - 2.0L * g1;
      Real fppp = u * g4 - 6.0L * x * g3 - 6.0L * g2;
      Real r = a * a + b * b, s = a * a - b * b;
      Real q = (2.0L * nn + a + b) * (2.0L * nn + a + b);
      if (jc == JacobiConstants::scaled) {
        r *= 4.0L;
        s *= 2.0L;
        q *= 2.0L;
      }
      return combine({(x * x - 1.0L) * (x * x - 1.0L) * fppp,
                      2.0L * (x * x - 1.0L) * (x * fpp - 3.0L * fp * fp),
                      (8.0L * x * f - q * (x * x - 1.0L) - 2.0L * s * x - 2.0L * r) * fp,
                      -f * (2.0L * f - q * x - s)});
    }
  }
  throw std::invalid_argument("gap_ode_terms: unknown family");
}

inline Real painleve_default_step(TauWeight fam) {
  return fam == TauWeight::jacobi ? 0.008L : 0.02L;
}

struct PainleveScan {
  Real max_scaled = 0.0L;
  Real max_scaled_coarse = 0.0L;
};

// scaled ODE residual over [lo, hi]: a dense log-gap table is differentiated
// with central stencils at strides 1 and 2; the stride-2 pass feeds the
// error estimate
inline PainleveScan painleve_scan(TauWeight fam, long n, Real a, Real b, Real lo, Real hi,
                                  const StencilSpec& spec, JacobiConstants jc) {
  Real h = spec.x_step > 0.0L ? spec.x_step : painleve_default_step(fam);
  int d1m = (static_cast<int>(central_coefficients(1, spec.table_order).size()) - 1) / 2;
  int d4m = (static_cast<int>(central_coefficients(4, spec.table_order).size()) - 1) / 2;
  int margin = 2 * std::max(d1m, d4m);
  long steps = static_cast<long>(std::ceil((hi - lo) / h));
  std::vector<Real> xs;
  for (long i = -margin; i <= steps + margin; ++i)
    xs.push_back(lo + static_cast<Real>(i) * h);
  std::vector<Real> table = log_gap_table(fam, n, a, b, xs);

  for (long i = 0; i <= steps; ++i) {
    Real p = std::exp(table[static_cast<std::size_t>(i + margin)]);
    if (p < 1e-8L || p > 1.0L - 1e-8L)
      throw numeric_error("painleve_residual: gap probability out of numeric range");
  }

  std::array<std::vector<Real>, 4> coef;
  for (int d = 1; d <= 4; ++d) coef[static_cast<std::size_t>(d - 1)] =
      central_coefficients(d, spec.table_order);
  auto deriv = [&](long center, int d, long stride) {
    const auto& cs = coef[static_cast<std::size_t>(d - 1)];
    long m = (static_cast<long>(cs.size()) - 1) / 2;
    Real s = 0.0L;
    for (long j = -m; j <= m; ++j)
      s += cs[static_cast<std::size_t>(j + m)] *
           table[static_cast<std::size_t>(center + j * stride)];
    Real hd = 1.0L;
    for (int e = 0; e < d; ++e) hd *= h * static_cast<Real>(stride);
    return s / hd;
  };

  PainleveScan scan;
  for (long i = 0; i <= steps; ++i) {
    long center = i + margin;
    Real x = xs[static_cast<std::size_t>(center)];
    auto fine = gap_ode_terms(fam, n, a, b, x, deriv(center, 1, 1), deriv(center, 2, 1),
                              deriv(center, 3, 1), deriv(center, 4, 1), jc);
    if (!(fine.scale > 0.0L)) throw numeric_error("painleve_residual: vanishing term scale");
    scan.max_scaled = std::max(scan.max_scaled, std::fabs(fine.residual) / fine.scale);
    auto coarse = gap_ode_terms(fam, n, a, b, x, deriv(center, 1, 2), deriv(center, 2, 2),
                                deriv(center, 3, 2), deriv(center, 4, 2), jc);
    scan.max_scaled_coarse =
        std::max(scan.max_scaled_coarse, std::fabs(coarse.residual) / coarse.scale);
  }
  return scan;
}

}  // namespace detail

// largest scaled residual of the family's third-order ODE over [lo, hi]
inline ResidualReport painleve_max_residual(TauWeight fam, long n, Real a, Real b, Real lo,
                                            Real hi, const StencilSpec& spec = {},
                                            JacobiConstants jc = JacobiConstants::plain) {
  detail::stencil_validate(spec);
  if (n < 1) throw std::invalid_argument("painleve_residual: order must be positive");
  if (!(lo < hi)) throw std::invalid_argument("painleve_residual: empty evaluation range");
  TauContext probe = make_tau_context(fam, n, a, b);
  detail::tau_validate(probe);
  auto scan = detail::painleve_scan(fam, n, a, b, lo, hi, spec, jc);
  ResidualReport rep;
  rep.check = "painleve";
  rep.family = detail::tau_family_name(fam);
  rep.n = n;
  rep.params = {{"a", a}, {"b", b}, {"lo", lo}, {"hi", hi}};
  rep.residual = scan.max_scaled;
  rep.error_estimate = std::max(std::fabs(scan.max_scaled_coarse - scan.max_scaled), 1e-15L);
  if (rep.error_estimate > spec.max_error)
    throw numeric_error("painleve_residual: stencil error estimate exceeds the requested bound");
  return rep;
}

// single-point version of the scan
inline ResidualReport painleve_residual(TauWeight fam, long n, Real a, Real b, Real x,
                                        const StencilSpec& spec = {},
                                        JacobiConstants jc = JacobiConstants::plain) {
  Real h = spec.x_step > 0.0L ? spec.x_step : detail::painleve_default_step(fam);
  ResidualReport rep = painleve_max_residual(fam, n, a, b, x, x + h * 0.5L, spec, jc);
  rep.params = {{"a", a}, {"b", b}, {"x", x}};
  return rep;
}

// the n-fold squared-difference-product integral over the domain, divided by
// n!; agrees with tau for small n
inline Real multiple_integral_tau(const TauContext& c) {
  detail::tau_validate(c);
  if (c.n == 0) return 1.0L;
  if (c.n > 3) throw std::invalid_argument("multiple_integral_tau: cubature limited to n <= 3");
  if (tau_degenerate(c)) return 0.0L;
  detail::tau_guard(c, 2 * c.n + 1);
  auto [blo, bhi] = detail::tau_box(c.family);
  IntervalList pieces = detail::tau_effective_domain(c).clipped(blo, bhi);
  // panels no wider than 2 keep the per-panel rule accurate for the steep
  // exponential weights
  auto weighted_nodes = [&](long per_panel) {
    QuadratureRule all;
    for (const auto& [lo, hi] : pieces.parts) {
      long panels = static_cast<long>(std::ceil((hi - lo) / 2.0L));
      for (long p = 0; p < panels; ++p) {
        Real plo = lo + (hi - lo) * static_cast<Real>(p) / static_cast<Real>(panels);
        Real phi = lo + (hi - lo) * static_cast<Real>(p + 1) / static_cast<Real>(panels);
        QuadratureRule r = gauss_legendre_on(per_panel, plo, phi);
        for (std::size_t i = 0; i < r.nodes.size(); ++i) {
          Real w = r.weights[i] * std::exp(detail::tau_log_base_weight(c, r.nodes[i]) +
                                           detail::tau_deformation(c, r.nodes[i]));
          all.nodes.push_back(r.nodes[i]);
          all.weights.push_back(w);
        }
      }
    }
    return all;
  };
  auto value_at = [&](long per_panel) {
    QuadratureRule r = weighted_nodes(per_panel);
    std::size_t m = r.nodes.size();
    Real total = 0.0L;
    std::vector<std::size_t> idx(static_cast<std::size_t>(c.n), 0);
    while (true) {
      Real w = 1.0L, vandermonde = 1.0L;
      for (std::size_t i = 0; i < idx.size(); ++i) {
        w *= r.weights[idx[i]];
        for (std::size_t j = i + 1; j < idx.size(); ++j)
          vandermonde *= (r.nodes[idx[i]] - r.nodes[idx[j]]);
      }
      total += w * vandermonde * vandermonde;
      std::size_t pos = idx.size();
      while (pos > 0) {
        --pos;
        if (++idx[pos] < m) break;
        idx[pos] = 0;
        if (pos == 0) {
          Real fact = 1.0L;
          for (long f = 2; f <= c.n; ++f) fact *= static_cast<Real>(f);
          return total / fact;
        }
      }
    }
  };
  Real prev = value_at(24);
  Real cur = value_at(32);
  if (std::fabs(cur - prev) > 1e-8L * std::max<Real>(1.0L, std::fabs(cur)))
    throw numeric_error("multiple_integral_tau: cubature did not stabilize");
  return cur;
}

}  // namespace rmt
