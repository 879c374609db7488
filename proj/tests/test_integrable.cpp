#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "rmtlab/cd_kernel.hpp"
#include "rmtlab/integrable.hpp"
#include "rmtlab/quadrature.hpp"

using rmt::CDKernel;
using rmt::IntervalList;
using rmt::JacobiConstants;
using rmt::Real;
using rmt::ResidualReport;
using rmt::StencilSpec;
using rmt::TauContext;
using rmt::TauWeight;
using rmt::TodaEntries;
using rmt::WeightFamily;
using rmt::make_tau_context;
using rmt::numeric_error;

namespace {

const Real kPi = 3.14159265358979323846L;

Real inf() { return std::numeric_limits<Real>::infinity(); }

IntervalList below(Real y) { return IntervalList::normalized({{-inf(), y}}); }

}  // namespace

TEST_CASE("deformed moment determinants match closed forms", "[integrable]") {
  TauContext g = make_tau_context(TauWeight::gauss, 1);
  CHECK(std::fabs(rmt::tau(g) - std::sqrt(kPi)) < 1e-14L);
  g.n = 2;
  CHECK(std::fabs(rmt::tau(g) - kPi / 2.0L) < 1e-14L);
  g.n = 3;
  CHECK(std::fabs(rmt::tau(g) - std::pow(kPi, 1.5L) / 4.0L) < 1e-14L);
  g.n = 0;
  CHECK(rmt::tau(g) == 1.0L);

  // norms of the monic family: tau_{n+1}/tau_n = sqrt(pi) n! / 2^n
  for (long n = 0; n <= 5; ++n) {
    TauContext lo = make_tau_context(TauWeight::gauss, n);
    TauContext hi = make_tau_context(TauWeight::gauss, n + 1);
    Real want = std::sqrt(kPi);
    for (long m = 1; m <= n; ++m) want *= static_cast<Real>(m) / 2.0L;
    CHECK(std::fabs(rmt::tau(hi) / rmt::tau(lo) - want) < 1e-12L * want);
  }

  TauContext lag = make_tau_context(TauWeight::laguerre, 2, 1.0L);
  CHECK(std::fabs(rmt::tau(lag) - 2.0L) < 1e-13L);
  TauContext jac = make_tau_context(TauWeight::jacobi, 2);
  CHECK(std::fabs(rmt::tau(jac) - 4.0L / 3.0L) < 1e-14L);

  SECTION("single-time deformations of the gaussian integral") {
    TauContext d = make_tau_context(TauWeight::gauss, 1);
    d.t[0] = 0.3L;
    CHECK(std::fabs(rmt::tau(d) - std::sqrt(kPi) * std::exp(0.09L / 4.0L)) < 1e-14L);
    d.t[0] = 0.0L;
    d.t[1] = 0.25L;
    CHECK(std::fabs(rmt::tau(d) - std::sqrt(kPi / 0.75L)) < 1e-14L);
  }

  SECTION("degenerate and divergent contexts") {
    TauContext empty = make_tau_context(TauWeight::gauss, 2);
    empty.domain = IntervalList::normalized({{2.0L, 1.0L}});
    CHECK(rmt::tau_degenerate(empty));
    CHECK(rmt::tau(empty) == 0.0L);
    empty.n = 0;
    CHECK(rmt::tau(empty) == 1.0L);

    TauContext off = make_tau_context(TauWeight::jacobi, 1);
    off.domain = IntervalList::normalized({{2.0L, 3.0L}});
    CHECK(rmt::tau_degenerate(off));

    TauContext quartic = make_tau_context(TauWeight::gauss, 1);
    quartic.t[3] = 0.1L;
    CHECK_THROWS_AS(rmt::tau(quartic), numeric_error);

    TauContext pushed = make_tau_context(TauWeight::gauss, 1);
    pushed.t[0] = 10.0L;
    CHECK_THROWS_AS(rmt::tau(pushed), numeric_error);

    TauContext stabilized = make_tau_context(TauWeight::jacobi, 2);
    stabilized.t = {0.05L, -0.02L, 0.01L, -0.01L};
    CHECK(rmt::tau(stabilized) > 0.0L);
  }

  SECTION("parameter validation") {
    TauContext bad = make_tau_context(TauWeight::gauss, -1);
    CHECK_THROWS_AS(rmt::tau(bad), std::invalid_argument);
    TauContext lbad = make_tau_context(TauWeight::laguerre, 1, -1.0L);
    CHECK_THROWS_AS(rmt::tau(lbad), std::invalid_argument);
    TauContext jbad = make_tau_context(TauWeight::jacobi, 1, 0.0L, -1.5L);
    CHECK_THROWS_AS(rmt::tau(jbad), std::invalid_argument);
  }
}

TEST_CASE("determinants equal the n-fold squared vandermonde integrals", "[integrable]") {
  for (long n = 1; n <= 3; ++n) {
    TauContext g = make_tau_context(TauWeight::gauss, n);
    g.domain = IntervalList::normalized({{-7.0L, 7.0L}});
    Real tv = rmt::tau(g);
    CHECK(std::fabs(rmt::multiple_integral_tau(g) - tv) < 1e-6L * tv);
  }
  TauContext lag = make_tau_context(TauWeight::laguerre, 2, 1.0L);
  lag.domain = IntervalList::normalized({{0.0L, 6.0L}});
  CHECK(std::fabs(rmt::multiple_integral_tau(lag) - rmt::tau(lag)) < 1e-6L * rmt::tau(lag));

  TauContext jac = make_tau_context(TauWeight::jacobi, 3);
  CHECK(std::fabs(rmt::multiple_integral_tau(jac) - rmt::tau(jac)) < 1e-6L * rmt::tau(jac));

  TauContext deformed = make_tau_context(TauWeight::jacobi, 2);
  deformed.t = {0.05L, -0.02L, 0.01L, -0.01L};
  CHECK(std::fabs(rmt::multiple_integral_tau(deformed) - rmt::tau(deformed)) <
        1e-6L * rmt::tau(deformed));

  TauContext zero = make_tau_context(TauWeight::gauss, 0);
  CHECK(rmt::multiple_integral_tau(zero) == 1.0L);
  TauContext big = make_tau_context(TauWeight::gauss, 4);
  CHECK_THROWS_AS(rmt::multiple_integral_tau(big), std::invalid_argument);
}

TEST_CASE("restricted determinant ratios reproduce kernel gap probabilities", "[integrable]") {
  for (long n = 1; n <= 4; ++n) {
    TauContext full = make_tau_context(TauWeight::gauss, n);
    Real denom = rmt::tau(full);
    CDKernel kern(WeightFamily::Hermite, n);
    for (Real y : {-0.3L, 0.5L, 1.2L}) {
      TauContext cut = full;
      cut.domain = below(y);
      Real ratio = rmt::tau(cut) / denom;
      Real gp = rmt::gap_probability(kern, IntervalList::normalized({{y, inf()}}));
      CHECK(std::fabs(ratio - gp) < 1e-8L);
    }
  }
}

TEST_CASE("bordered determinants give monic orthogonal polynomials", "[integrable]") {
  TauContext g2 = make_tau_context(TauWeight::gauss, 2);
  for (Real z : {0.0L, 0.7L, -1.3L})
    CHECK(std::fabs(rmt::monic_orthopoly(g2, z) - (z * z - 0.5L)) < 1e-12L);
  TauContext g0 = make_tau_context(TauWeight::gauss, 0);
  CHECK(rmt::monic_orthopoly(g0, 1.7L) == 1.0L);

  SECTION("gram-schmidt on the power basis gives the same values") {
    // independent construction straight from definitions
    std::vector<Real> xs, ws;
    for (int p = 0; p < 8; ++p) {
      rmt::QuadratureRule r = rmt::gauss_legendre_on(24, -8.0L + 2.0L * p, -6.0L + 2.0L * p);
      xs.insert(xs.end(), r.nodes.begin(), r.nodes.end());
      ws.insert(ws.end(), r.weights.begin(), r.weights.end());
    }
    auto ip = [&](const std::vector<Real>& pa, const std::vector<Real>& pb) {
      Real s = 0.0L;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        Real va = 0.0L, vb = 0.0L;
        for (std::size_t d = pa.size(); d-- > 0;) va = va * xs[i] + pa[d];
        for (std::size_t d = pb.size(); d-- > 0;) vb = vb * xs[i] + pb[d];
        s += ws[i] * va * vb * std::exp(-xs[i] * xs[i]);
      }
      return s;
    };
    std::vector<std::vector<Real>> basis;
    for (long n = 0; n <= 4; ++n) {
      std::vector<Real> p(static_cast<std::size_t>(n + 1), 0.0L);
      p[static_cast<std::size_t>(n)] = 1.0L;
      for (const auto& q : basis) {
        Real c = ip(p, q) / ip(q, q);
        for (std::size_t d = 0; d < q.size(); ++d) p[d] -= c * q[d];
      }
      basis.push_back(p);
      TauContext ctx = make_tau_context(TauWeight::gauss, n);
      for (Real z : {-1.1L, 0.4L, 2.0L}) {
        Real want = 0.0L;
        for (std::size_t d = p.size(); d-- > 0;) want = want * z + p[d];
        CHECK(std::fabs(rmt::monic_orthopoly(ctx, z) - want) < 1e-10L);
      }
    }
  }

  SECTION("orthogonality for the plain and deformed weights") {
    for (int pass = 0; pass < 2; ++pass) {
      TauContext c = make_tau_context(TauWeight::gauss, 0);
      if (pass) c.t = {0.02L, -0.01L, 0.005L, 0.0L};
      std::vector<Real> xs, ws;
      for (int p = 0; p < 8; ++p) {
        rmt::QuadratureRule r = rmt::gauss_legendre_on(24, -8.0L + 2.0L * p, -6.0L + 2.0L * p);
        xs.insert(xs.end(), r.nodes.begin(), r.nodes.end());
        ws.insert(ws.end(), r.weights.begin(), r.weights.end());
      }
      std::vector<std::vector<Real>> vals;
      for (long d = 0; d <= 6; ++d) {
        c.n = d;
        vals.push_back(rmt::monic_orthopoly_values(c, xs));
      }
      auto tilt = [&](Real x) {
        return ((c.t[3] * x + c.t[2]) * x + c.t[1]) * x * x + c.t[0] * x;
      };
      for (long a = 0; a <= 6; ++a)
        for (long b = 0; b <= a; ++b) {
          Real s = 0.0L;
          for (std::size_t i = 0; i < xs.size(); ++i)
            s += ws[i] * vals[static_cast<std::size_t>(a)][i] *
                 vals[static_cast<std::size_t>(b)][i] *
                 std::exp(-xs[i] * xs[i] + tilt(xs[i]));
          if (a == b)
            CHECK(s > 0.0L);
          else
            CHECK(std::fabs(s) < 1e-9L);
        }
    }
  }

  SECTION("shifted-time determinant ratio evaluates the polynomial") {
    auto tau_rep = [](TauContext base, Real z) {
      TauContext shifted = base;
      for (int i = 0; i < 4; ++i)
        shifted.t[i] -=
            1.0L / (static_cast<Real>(i + 1) * std::pow(z, static_cast<Real>(i + 1)));
      return std::pow(z, static_cast<Real>(base.n)) * rmt::tau(shifted) / rmt::tau(base);
    };
    TauContext n3 = make_tau_context(TauWeight::gauss, 3);
    for (Real z : {40.0L, -35.0L}) {
      Real lhs = rmt::monic_orthopoly(n3, z);
      CHECK(std::fabs(tau_rep(n3, z) - lhs) < 1e-8L * std::fabs(lhs));
    }
    TauContext deformed = make_tau_context(TauWeight::gauss, 2);
    deformed.t = {0.02L, -0.01L, 0.005L, 0.0L};
    Real lhs = rmt::monic_orthopoly(deformed, 40.0L);
    CHECK(std::fabs(tau_rep(deformed, 40.0L) - lhs) < 1e-8L * std::fabs(lhs));
  }

  SECTION("singular moment matrix is rejected") {
    TauContext empty = make_tau_context(TauWeight::gauss, 2);
    empty.domain = IntervalList::normalized({{2.0L, 1.0L}});
    CHECK_THROWS_AS(rmt::monic_orthopoly(empty, 0.0L), numeric_error);
  }
}

TEST_CASE("determinant ratios generate the lattice recurrence", "[integrable]") {
  for (long n = 0; n <= 3; ++n) {
    TauContext c = make_tau_context(TauWeight::gauss, n);
    TodaEntries td = rmt::toda_entries(c);
    TodaEntries rc = rmt::recurrence_entries(c);
    CHECK(std::fabs(td.b) < 1e-10L);
    CHECK(std::fabs(td.a * td.a - (static_cast<Real>(n) + 1.0L) / 2.0L) < 1e-10L);
    CHECK(std::fabs(td.b - rc.b) < 1e-6L);
    CHECK(std::fabs(td.a - rc.a) < 1e-6L);
    // subdiagonal consistency: the norm ratio equals the lattice entry
    CHECK(std::fabs(rc.a - td.a) < 1e-8L);
  }

  TauContext deformed = make_tau_context(TauWeight::gauss, 2);
  deformed.t = {0.05L, -0.02L, 0.01L, 0.0L};
  TodaEntries td = rmt::toda_entries(deformed);
  TodaEntries rc = rmt::recurrence_entries(deformed);
  CHECK(std::fabs(td.b - rc.b) < 1e-6L);
  CHECK(std::fabs(td.a - rc.a) < 1e-6L);
  CHECK(td.b > 0.0L);  // positive linear tilt pushes the diagonal up

  TauContext lag = make_tau_context(TauWeight::laguerre, 1, 1.0L);
  lag.domain = IntervalList::normalized({{0.0L, 20.0L}});
  TodaEntries lt = rmt::toda_entries(lag);
  TodaEntries lr = rmt::recurrence_entries(lag);
  CHECK(std::fabs(lt.b - lr.b) < 1e-6L);
  CHECK(std::fabs(lt.a - lr.a) < 1e-6L);
  CHECK(std::fabs(lt.b - 4.0L) < 1e-3L);  // 2n + 1 + a up to box truncation

  StencilSpec bad;
  bad.t_step[0] = 0.0L;
  CHECK_THROWS_AS(rmt::toda_entries(make_tau_context(TauWeight::gauss, 1), bad),
                  std::invalid_argument);
}

TEST_CASE("log determinants satisfy the first lattice equation", "[integrable]") {
  StencilSpec spec;

  TauContext g1 = make_tau_context(TauWeight::gauss, 1);
  ResidualReport r1 = rmt::kp_residual(g1, spec);
  CHECK(r1.residual < 1e-5L);
  CHECK(r1.residual < std::max(1e-5L, 10.0L * r1.error_estimate));

  TauContext g3 = make_tau_context(TauWeight::gauss, 3);
  g3.domain = below(1.0L);
  ResidualReport r3 = rmt::kp_residual(g3, spec);
  CHECK(r3.residual < 1e-4L);
  CHECK(r3.residual < std::max(1e-4L, 10.0L * r3.error_estimate));

  TauContext lag = make_tau_context(TauWeight::laguerre, 2, 1.0L);
  lag.domain = IntervalList::normalized({{0.0L, 2.0L}});
  ResidualReport rl = rmt::kp_residual(lag, spec);
  CHECK(rl.residual < 1e-4L);
  CHECK(rl.residual < std::max(1e-4L, 10.0L * rl.error_estimate));

  SECTION("stencil and context validation") {
    StencilSpec tight = spec;
    tight.max_error = 1e-5L;  // the cut-domain case estimates a few 1e-4
    CHECK_THROWS_AS(rmt::kp_residual(g3, tight), numeric_error);

    StencilSpec bad = spec;
    bad.richardson_levels = 1;
    CHECK_THROWS_AS(rmt::kp_residual(g1, bad), std::invalid_argument);
    bad = spec;
    bad.t_step[1] = -1.0L;
    CHECK_THROWS_AS(rmt::kp_residual(g1, bad), std::invalid_argument);

    TauContext moving = g1;
    moving.t[0] = 0.1L;
    CHECK_THROWS_AS(rmt::kp_residual(moving, spec), std::invalid_argument);
    TauContext zero = make_tau_context(TauWeight::gauss, 0);
    CHECK_THROWS_AS(rmt::kp_residual(zero, spec), std::invalid_argument);
  }
}

TEST_CASE("boundary constraints annihilate the log determinants", "[integrable]") {
  StencilSpec spec;

  SECTION("gaussian weight, whole line") {
    for (long n = 1; n <= 3; ++n)
      for (int k = -1; k <= 1; ++k) {
        TauContext c = make_tau_context(TauWeight::gauss, n);
        ResidualReport r = rmt::virasoro_residual(c, k, spec);
        CHECK(r.residual < 1e-6L);
      }
  }

  SECTION("gaussian weight, half line") {
    TauContext c = make_tau_context(TauWeight::gauss, 2);
    c.domain = below(1.0L);
    CHECK(rmt::virasoro_residual(c, -1, spec).residual < 1e-5L);
    CHECK(rmt::virasoro_residual(c, 0, spec).residual < 1e-4L);
    CHECK(rmt::virasoro_residual(c, 1, spec).residual < 1e-4L);
  }

  SECTION("one-sided weight on an interval and on its full support") {
    TauContext c = make_tau_context(TauWeight::laguerre, 2, 1.0L);
    c.domain = IntervalList::normalized({{0.0L, 2.0L}});
    for (int k = -1; k <= 1; ++k)
      CHECK(rmt::virasoro_residual(c, k, spec).residual < 1e-4L);

    TauContext full = make_tau_context(TauWeight::laguerre, 2, 1.0L);
    CHECK(rmt::virasoro_residual(full, -1, spec).residual < 1e-8L);
  }

  SECTION("two-sided weight with hard edges") {
    TauContext full = make_tau_context(TauWeight::jacobi, 2, 1.0L, 0.0L);
    for (int k = -1; k <= 1; ++k)
      CHECK(rmt::virasoro_residual(full, k, spec).residual < 1e-10L);

    TauContext cut = make_tau_context(TauWeight::jacobi, 2, 1.0L, 0.5L);
    cut.domain = IntervalList::normalized({{-1.0L, 0.5L}});
    for (int k = -1; k <= 1; ++k)
      CHECK(rmt::virasoro_residual(cut, k, spec).residual < 1e-10L);
  }

  SECTION("rejections") {
    TauContext near_edge = make_tau_context(TauWeight::laguerre, 2, 1.0L);
    near_edge.domain = IntervalList::normalized({{1e-9L, 2.0L}});
    CHECK_THROWS_AS(rmt::virasoro_residual(near_edge, -1, spec), numeric_error);

    TauContext g = make_tau_context(TauWeight::gauss, 2);
    CHECK_THROWS_AS(rmt::virasoro_residual(g, 2, spec), std::invalid_argument);
    TauContext moving = g;
    moving.t[2] = 0.01L;
    CHECK_THROWS_AS(rmt::virasoro_residual(moving, 0, spec), std::invalid_argument);
  }
}

TEST_CASE("gap probability logs satisfy the painleve equations", "[integrable]") {
  StencilSpec spec;

  ResidualReport g = rmt::painleve_max_residual(TauWeight::gauss, 3, 0, 0, 0.5L, 3.0L, spec);
  CHECK(g.residual < 1e-3L);
  CHECK(g.residual < std::max(1e-3L, 10.0L * g.error_estimate));

  ResidualReport l =
      rmt::painleve_max_residual(TauWeight::laguerre, 2, 1.0L, 0, 1.0L, 8.0L, spec);
  CHECK(l.residual < 1e-3L);
  CHECK(l.residual < std::max(1e-3L, 10.0L * l.error_estimate));

  ResidualReport j = rmt::painleve_max_residual(TauWeight::jacobi, 2, 0, 0, 0.1L, 0.9L, spec);
  CHECK(j.residual < 1e-3L);
  CHECK(j.residual < std::max(1e-3L, 10.0L * j.error_estimate));

  SECTION("only one printed normalization of the constants is consistent") {
    StencilSpec loose = spec;
    loose.max_error = 1.0L;
    ResidualReport scaled = rmt::painleve_max_residual(TauWeight::jacobi, 2, 0, 0, 0.1L, 0.9L,
                                                       loose, JacobiConstants::scaled);
    CHECK(scaled.residual > 1e-2L);
  }

  SECTION("single point evaluation and report payload") {
    ResidualReport pt = rmt::painleve_residual(TauWeight::gauss, 3, 0, 0, 1.5L, spec);
    CHECK(pt.residual < 1e-6L);
    std::string js = pt.to_json();
    CHECK(js.find("\"check\":\"painleve\"") != std::string::npos);
    CHECK(js.find("\"family\":\"gauss\"") != std::string::npos);
    CHECK(js.find("\"n\":3") != std::string::npos);
    CHECK(js.find("\"x\":1.5") != std::string::npos);
    CHECK(js.find("\"residual\":") != std::string::npos);
    CHECK(js.find("\"error_estimate\":") != std::string::npos);
  }

  SECTION("probabilities outside the resolvable window are rejected") {
    CHECK_THROWS_AS(rmt::painleve_max_residual(TauWeight::gauss, 3, 0, 0, 6.0L, 7.0L, spec),
                    numeric_error);
    CHECK_THROWS_AS(rmt::painleve_max_residual(TauWeight::gauss, 3, 0, 0, 2.0L, 1.0L, spec),
                    std::invalid_argument);
    CHECK_THROWS_AS(rmt::painleve_max_residual(TauWeight::gauss, 0, 0, 0, 0.5L, 3.0L, spec),
                    std::invalid_argument);
  }
}

TEST_CASE("residual reports carry their context", "[integrable]") {
  TauContext lag = make_tau_context(TauWeight::laguerre, 2, 1.0L);
  lag.domain = IntervalList::normalized({{0.0L, 2.0L}});
  ResidualReport rep = rmt::kp_residual(lag);
  std::string js = rep.to_json();
  CHECK(js.find("\"check\":\"kp\"") != std::string::npos);
  CHECK(js.find("\"family\":\"laguerre\"") != std::string::npos);
  CHECK(js.find("\"n\":2") != std::string::npos);
  CHECK(js.find("\"a\":1") != std::string::npos);

  ResidualReport vr = rmt::virasoro_residual(make_tau_context(TauWeight::gauss, 2), 0);
  std::string vjs = vr.to_json();
  CHECK(vjs.find("\"check\":\"virasoro\"") != std::string::npos);
  CHECK(vjs.find("\"k\":0") != std::string::npos);
}
