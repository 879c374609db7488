#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmtlab/airy.hpp"
#include "rmtlab/common.hpp"
#include "rmtlab/ode.hpp"
#include "rmtlab/quadrature.hpp"
#include "rmtlab/toeplitz.hpp"

namespace rmt {

struct HastingsMcLeodSolution {
  std::vector<Real> grid;
  std::vector<Real> g;
  std::vector<Real> gp;
  std::vector<Real> r;  // integral of g^2 from the point to +infinity
  std::vector<Real> s;  // integral of (alpha - x) g^2, so cdf = exp(-s)
};

namespace detail {

inline constexpr Real kHmAnchor = 8.0L;

// state: g, g', R, S, then running mass and first two moments of the density
inline void hm_rhs(Real x, const std::array<Real, 7>& y, std::array<Real, 7>& d) {
  Real g = y[0], gp = y[1], rr = y[2], ss = y[3];
  Real fp = std::exp(-ss) * rr;
  d[0] = gp;
  d[1] = x * g + 2.0L * g * g * g;
  d[2] = -g * g;
  d[3] = -rr;
  d[4] = -fp;
  d[5] = -x * fp;
  d[6] = -x * x * fp;
}

// R at the anchor comes from the first integral g'^2 - x g^2 - g^4; S by
// quadrature of the tail where g is indistinguishable from the airy function.
inline const std::array<Real, 7>& hm_anchor_state() {
  static const std::array<Real, 7> anchor = [] {
    AiryValues v = airy_raw(kHmAnchor);
    Real g = v.a, gp = v.ap;
    Real rr = gp * gp - kHmAnchor * g * g - g * g * g * g;
    Real ss = integrate_adaptive(
        [](Real u) {
          Real a = airy_raw(u).a;
          return (u - kHmAnchor) * a * a;
        },
        kHmAnchor, kHmAnchor + 18.0L, 1e-13L);
    return std::array<Real, 7>{g, gp, rr, ss, 0.0L, 0.0L, 0.0L};
  }();
  return anchor;
}

// Leftward of the origin the decaying branch is a separatrix: deviations
// grow like e^{(2sqrt(2)/3)|x|^{3/2}}, about 2e9 by x = -8.  Holding the
// branch there to ~1e-5 requires per-step tolerances near the arithmetic
// floor, far tighter than the accuracy the solution itself is quoted at.
inline void hm_advance(Real& x, std::array<Real, 7>& y, Real target) {
  OdeOptions opt;
  opt.rel_tol = 1e-17L;
  opt.abs_tol = 1e-20L;
  opt.max_abs = 1e6L;
  try {
    ode_integrate<7>(hm_rhs, x, y, target, opt);
  } catch (const numeric_error& e) {
    if (std::string(e.what()).find("escaped bounds") != std::string::npos)
      throw numeric_error("hastings_mcleod: solution blew up, left the decaying branch");
    throw;
  }
}

inline std::array<Real, 7> hm_states_at(Real x) {
  std::array<Real, 7> y = hm_anchor_state();
  Real t = kHmAnchor;
  hm_advance(t, y, x);
  return y;
}

}  // namespace detail

inline HastingsMcLeodSolution hastings_mcleod(std::vector<Real> grid) {
  if (grid.empty()) throw std::invalid_argument("hastings_mcleod: empty grid");
  for (Real v : grid)
    if (!(v >= -10.0L && v <= 10.0L))
      throw std::invalid_argument("hastings_mcleod: grid outside [-10, 10]");
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  HastingsMcLeodSolution sol;
  sol.grid = grid;
  std::size_t n = grid.size();
  sol.g.resize(n);
  sol.gp.resize(n);
  sol.r.resize(n);
  sol.s.resize(n);
  auto record = [&](std::size_t i, const std::array<Real, 7>& y) {
    sol.g[i] = y[0];
    sol.gp[i] = y[1];
    sol.r[i] = y[2];
    sol.s[i] = y[3];
  };
  std::array<Real, 7> y = detail::hm_anchor_state();
  Real x = detail::kHmAnchor;
  for (std::size_t i = 0; i < n; ++i)
    if (grid[i] > detail::kHmAnchor) {
      detail::hm_advance(x, y, grid[i]);
      record(i, y);
    }
  y = detail::hm_anchor_state();
  x = detail::kHmAnchor;
  for (std::size_t ii = n; ii-- > 0;)
    if (grid[ii] <= detail::kHmAnchor) {
      detail::hm_advance(x, y, grid[ii]);
      record(ii, y);
    }
  return sol;
}

inline Real tw_cdf_painleve(Real x) {
  if (!(x >= -10.0L && x <= 10.0L))
    throw std::invalid_argument("tw_cdf_painleve: x outside [-10, 10]");
  return std::exp(-detail::hm_states_at(x)[3]);
}

inline Real tw_density_painleve(Real x) {
  if (!(x >= -10.0L && x <= 10.0L))
    throw std::invalid_argument("tw_density_painleve: x outside [-10, 10]");
  auto y = detail::hm_states_at(x);
  return std::exp(-y[3]) * y[2];
}

struct TwMoments {
  Real mean = 0.0L;
  Real stddev = 0.0L;
  Real mass = 0.0L;
};

inline TwMoments tw_moments() {
  auto y = detail::hm_states_at(-10.0L);
  TwMoments m;
  m.mass = y[4];
  m.mean = y[5];
  m.stddev = std::sqrt(y[6] - y[5] * y[5]);
  return m;
}

namespace detail {

struct TwPoint {
  Real cdf = 0.0L;
  Real density = 0.0L;
};

inline TwPoint tw_fredholm_at(Real x, long m) {
  Real t_len = std::max(12.0L, 40.0L - 2.0L * x);
  QuadratureRule rule = gauss_legendre_on(m, x, x + t_len);
  std::size_t nn = rule.nodes.size();
  std::vector<AiryValues> av(nn);
  std::vector<Real> sq(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    av[i] = airy_raw(rule.nodes[i]);
    sq[i] = std::sqrt(rule.weights[i]);
  }
  std::vector<std::vector<Real>> a(nn, std::vector<Real>(nn));
  for (std::size_t i = 0; i < nn; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      Real k = (av[i].a * av[j].ap - av[i].ap * av[j].a) / (rule.nodes[i] - rule.nodes[j]);
      a[i][j] = -sq[i] * k * sq[j];
      a[j][i] = a[i][j];
    }
    Real diag = av[i].ap * av[i].ap - rule.nodes[i] * av[i].a * av[i].a;
    a[i][i] = 1.0L - rule.weights[i] * diag;
  }
  AiryValues ax = airy_raw(x);
  std::vector<Real> b(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    Real k = (av[i].a * ax.ap - av[i].ap * ax.a) / (rule.nodes[i] - x);
    b[i] = sq[i] * k;
  }
  // one factorization yields both the determinant and the resolvent solve
  std::vector<std::size_t> perm(nn);
  Real det = 1.0L;
  for (std::size_t c = 0; c < nn; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < nn; ++r)
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    perm[c] = piv;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = -det;
    }
    det *= a[c][c];
    if (a[c][c] == 0.0L) return {0.0L, 0.0L};
    for (std::size_t r = c + 1; r < nn; ++r) {
      Real f = a[r][c] / a[c][c];
      a[r][c] = f;
      for (std::size_t cc = c + 1; cc < nn; ++cc) a[r][cc] -= f * a[c][cc];
    }
  }
  for (std::size_t c = 0; c < nn; ++c)
    if (perm[c] != c) std::swap(b[perm[c]], b[c]);
  for (std::size_t i = 0; i < nn; ++i)
    for (std::size_t j = 0; j < i; ++j) b[i] -= a[i][j] * b[j];
  for (std::size_t ii = nn; ii-- > 0;) {
    for (std::size_t j = ii + 1; j < nn; ++j) b[ii] -= a[ii][j] * b[j];
    b[ii] /= a[ii][ii];
  }
  Real rho = ax.ap * ax.ap - x * ax.a * ax.a;
  for (std::size_t i = 0; i < nn; ++i) {
    Real k = (av[i].a * ax.ap - av[i].ap * ax.a) / (rule.nodes[i] - x);
    rho += sq[i] * k * b[i];
  }
  return {det, det * rho};
}

inline TwPoint tw_fredholm_stable(Real x, long max_nodes, DetDiagnostics* diag) {
  TwPoint prev = tw_fredholm_at(x, 64);
  for (long m = 128; m <= max_nodes; m *= 2) {
    TwPoint cur = tw_fredholm_at(x, m);
    if (std::fabs(cur.cdf - prev.cdf) < 1e-9L && std::fabs(cur.density - prev.density) < 1e-8L) {
      if (diag) {
        diag->truncation = static_cast<long>(std::max(12.0L, 40.0L - 2.0L * x));
        diag->nodes = m;
        diag->est_error = std::fabs(cur.cdf - prev.cdf);
        diag->imag_residue = 0.0L;
      }
      return cur;
    }
    prev = cur;
  }
  throw numeric_error("tw_cdf_fredholm: determinant did not stabilize under node doubling");
}

}  // namespace detail

inline Real tw_cdf_fredholm(Real x, DetDiagnostics* diag = nullptr, long max_nodes = 1024) {
  if (!(x >= -10.0L && x <= 8.0L))
    throw std::invalid_argument("tw_cdf_fredholm: x outside [-10, 8]");
  return detail::tw_fredholm_stable(x, max_nodes, diag).cdf;
}

inline Real tw_density_fredholm(Real x, long max_nodes = 1024) {
  if (!(x >= -10.0L && x <= 8.0L))
    throw std::invalid_argument("tw_density_fredholm: x outside [-10, 8]");
  return detail::tw_fredholm_stable(x, max_nodes, nullptr).density;
}

struct TracyWidomTable {
  std::vector<Real> x;
  std::vector<Real> cdf;
  std::vector<Real> density;
  std::string method;

  void validate() const {
    if (x.empty() || x.size() != cdf.size() || x.size() != density.size())
      throw numeric_error("TracyWidomTable: inconsistent columns");
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!(cdf[i] >= -1e-12L && cdf[i] <= 1.0L + 1e-12L))
        throw numeric_error("TracyWidomTable: cdf out of [0, 1]");
      if (!(density[i] >= 0.0L)) throw numeric_error("TracyWidomTable: negative density");
      if (i > 0 && !(cdf[i] >= cdf[i - 1])) throw numeric_error("TracyWidomTable: cdf decreases");
      if (x[i] <= -8.0L && !(cdf[i] < 1e-4L))
        throw numeric_error("TracyWidomTable: left endpoint mass too large");
      if (x[i] >= 6.0L && !(cdf[i] > 1.0L - 1e-8L))
        throw numeric_error("TracyWidomTable: right endpoint mass missing");
    }
  }

  std::string to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "x,F,density,method\n";
    for (std::size_t i = 0; i < x.size(); ++i)
      os << static_cast<double>(x[i]) << "," << static_cast<double>(cdf[i]) << ","
         << static_cast<double>(density[i]) << "," << method << "\n";
    return os.str();
  }
};

inline TracyWidomTable tw_table(Real lo, Real hi, Real step, const std::string& method) {
  if (!(step > 0.0L) || !(hi >= lo)) throw std::invalid_argument("tw_table: bad grid");
  if (method != "fredholm" && method != "painleve")
    throw std::invalid_argument("tw_table: method must be fredholm or painleve");
  if (!(lo >= -10.0L && hi <= 8.0L)) throw std::invalid_argument("tw_table: grid outside [-10, 8]");
  std::vector<Real> xs;
  long count = static_cast<long>(std::floor((hi - lo) / step + 1e-9L)) + 1;
  for (long i = 0; i < count; ++i) xs.push_back(lo + step * static_cast<Real>(i));
  TracyWidomTable table;
  table.x = xs;
  table.method = method;
  table.cdf.resize(xs.size());
  table.density.resize(xs.size());
  if (method == "painleve") {
    HastingsMcLeodSolution sol = hastings_mcleod(xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      table.cdf[i] = std::exp(-sol.s[i]);
      table.density[i] = table.cdf[i] * sol.r[i];
    }
  } else {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      detail::TwPoint p = detail::tw_fredholm_stable(xs[i], 1024, nullptr);
      table.cdf[i] = p.cdf;
      table.density[i] = p.density;
    }
  }
  return table;
}

struct TailReport {
  Real right_ratio_min = 0.0L;
  Real right_ratio_max = 0.0L;
  Real right_ratio_at_5 = 0.0L;
  Real left_dev_max = 0.0L;
  Real left_coeff_min = 0.0L;
  Real left_coeff_max = 0.0L;
  Real f_at_4 = 0.0L;
  bool pass = false;

  std::string to_json() const {
    std::ostringstream os;
    os.precision(10);
    os << "{\"right_ratio_min\":" << static_cast<double>(right_ratio_min)
       << ",\"right_ratio_max\":" << static_cast<double>(right_ratio_max)
       << ",\"right_ratio_at_5\":" << static_cast<double>(right_ratio_at_5)
       << ",\"left_dev_max\":" << static_cast<double>(left_dev_max)
       << ",\"left_coeff_min\":" << static_cast<double>(left_coeff_min)
       << ",\"left_coeff_max\":" << static_cast<double>(left_coeff_max)
       << ",\"f_at_4\":" << static_cast<double>(f_at_4) << ",\"pass\":" << (pass ? "true" : "false")
       << "}";
    return os.str();
  }
};

// decay-rate checks of both tails against their leading closed forms
inline TailReport tail_checks() {
  TailReport rep;
  rep.right_ratio_min = 1e30L;
  rep.right_ratio_max = -1e30L;
  for (Real x : {4.0L, 4.5L, 5.0L, 5.5L, 6.0L}) {
    auto y = detail::hm_states_at(x);
    Real density = std::exp(-y[3]) * y[2];
    Real ratio = density * 8.0L * detail::kAiryPi * x * std::exp((4.0L / 3.0L) * std::pow(x, 1.5L));
    rep.right_ratio_min = std::min(rep.right_ratio_min, ratio);
    rep.right_ratio_max = std::max(rep.right_ratio_max, ratio);
    if (x == 5.0L) rep.right_ratio_at_5 = ratio;
  }
  rep.left_coeff_min = 1e30L;
  rep.left_coeff_max = -1e30L;
  for (Real x : {-9.0L, -8.5L, -8.0L, -7.5L, -7.0L, -6.5L, -6.0L}) {
    auto y = detail::hm_states_at(x);
    Real cube = std::fabs(x) * std::fabs(x) * std::fabs(x);
    Real dev = std::fabs(-y[3] + cube / 12.0L) / cube;
    rep.left_dev_max = std::max(rep.left_dev_max, dev);
    Real coeff = y[3] / cube;
    rep.left_coeff_min = std::min(rep.left_coeff_min, coeff);
    rep.left_coeff_max = std::max(rep.left_coeff_max, coeff);
  }
  rep.f_at_4 = tw_cdf_painleve(4.0L);
  rep.pass = rep.right_ratio_min > 0.9L && rep.right_ratio_max < 1.1L &&
             rep.left_dev_max < 0.05L && rep.left_coeff_min > 0.95L / 12.0L &&
             rep.left_coeff_max < 1.05L / 12.0L && rep.f_at_4 > 1.0L - 1e-4L;
  return rep;
}

}  // namespace rmt
