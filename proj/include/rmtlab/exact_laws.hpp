#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rmtlab/common.hpp"
#include "rmtlab/partition.hpp"
#include "rmtlab/rational.hpp"

namespace rmt {

// A CDF sampled on an integer grid, carrying enough metadata to round-trip
// through CSV. Exact entries keep their rational rendering.
struct DistributionTable {
  std::string model;
  std::vector<std::pair<std::string, std::string>> params;
  std::vector<long> support;
  std::vector<Real> values;
  std::vector<std::string> printed;

  void push(long argument, const Rational& v) {
    support.push_back(argument);
    values.push_back(to_real(v));
    printed.push_back(to_string(v));
  }
  void push(long argument, Real v) {
    std::ostringstream os;
    os.precision(17);
    os << static_cast<double>(v);
    support.push_back(argument);
    values.push_back(v);
    printed.push_back(os.str());
  }

  void validate(Real tol = 1e-12L) const {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] < -tol || values[i] > 1.0L + tol)
        throw numeric_error("DistributionTable: value outside [0,1]");
      if (i > 0 && values[i] < values[i - 1] - tol)
        throw numeric_error("DistributionTable: CDF values must be weakly increasing");
    }
    if (!values.empty() && std::fabs(values.back() - 1.0L) > tol)
      throw numeric_error("DistributionTable: terminal CDF value must be 1");
  }

  std::string to_csv() const {
    std::ostringstream os;
    os << "model";
    for (const auto& kv : params) os << ',' << kv.first;
    os << ",argument,value\n";
    for (std::size_t i = 0; i < support.size(); ++i) {
      os << model;
      for (const auto& kv : params) os << ',' << kv.second;
      os << ',' << support[i] << ',' << printed[i] << '\n';
    }
    return os.str();
  }
};

// P(longest increasing subsequence of a uniform permutation of n is <= k),
// exact: sum of (f^lambda)^2/n! over shapes with lambda_1 <= k.
inline Rational perm_lis_cdf(long n, long k) {
  if (n < 1 || k < 1) throw std::invalid_argument("perm_lis_cdf: need n >= 1, k >= 1");
  if (k >= n) return Rational(1);
  Rational sum(0);
  for (const auto& l : partitions_of(n, k)) {
    BigInt f = dim_standard(l);
    sum += make_rational(f * f, factorial(static_cast<std::uint64_t>(n)));
  }
  return sum;
}

// P(longest weakly increasing subsequence of a uniform q-letter word of
// length n is <= k), exact.
inline Rational word_lis_cdf(long n, long q, long k) {
  if (n < 0 || q < 1 || k < 0) throw std::invalid_argument("word_lis_cdf: bad arguments");
  if (n == 0) return Rational(1);
  if (k == 0) return Rational(0);
  BigInt qn;
  mpz_ui_pow_ui(qn.get_mpz_t(), static_cast<unsigned long>(q), static_cast<unsigned long>(n));
  BigInt sum = 0;
  for (const auto& l : partitions_of(n, std::min(n, k), q))
    sum += dim_standard(l) * dim_semistandard(l, q);
  return make_rational(sum, qn);
}

namespace detail {

struct LogGamma {
  std::vector<Real> table;  // table[k] = log k!
  explicit LogGamma(long max_n) {
    table.assign(static_cast<std::size_t>(max_n) + 1, 0.0L);
    for (long k = 1; k <= max_n; ++k)
      table[static_cast<std::size_t>(k)] =
          table[static_cast<std::size_t>(k) - 1] + std::log(static_cast<Real>(k));
  }
  Real fact(long k) const { return table[static_cast<std::size_t>(k)]; }
};

// log of s_lambda(1^q) for a shape with at most q rows, via
// prod_i (q+l_i-i)!/(q-i)! divided by the hook product in factorial form.
inline Real log_dim_semistandard(const std::vector<long>& l, long q, const LogGamma& lg) {
  long m = static_cast<long>(l.size());
  Real s = 0.0L;
  for (long i = 1; i <= m; ++i) {
    long li = l[static_cast<std::size_t>(i - 1)];
    s += lg.fact(q + li - i) - lg.fact(q - i);
    s -= lg.fact(m + li - i);
  }
  for (long i = 1; i <= m; ++i)
    for (long j = i + 1; j <= m; ++j) {
      long d = (l[static_cast<std::size_t>(i - 1)] - i) - (l[static_cast<std::size_t>(j - 1)] - j);
      s += std::log(static_cast<Real>(d));
    }
  return s;
}

}  // namespace detail

// Geometric last-passage law, Schur-sum route: the shape sum runs over the
// finite box lambda_1 <= ell, rows <= min(p,q), so no tail is dropped.
inline Real geometric_lpp_cdf_schur(long p, long q, Real xi, long ell) {
  if (q > p) std::swap(p, q);
  detail::LogGamma lg(p + ell + q + 2);
  Real log_xi = std::log(xi);
  Real base = static_cast<Real>(p) * static_cast<Real>(q) * std::log1p(-xi);
  Real sum = 0.0L;
  std::vector<long> rows;
  std::function<void(long, long)> rec = [&](long r, long prev) {
    {
      long w = 0;
      for (long v : rows) w += v;
      Real logterm = base + static_cast<Real>(w) * log_xi +
                     detail::log_dim_semistandard(rows, p, lg) +
                     detail::log_dim_semistandard(rows, q, lg);
      sum += std::exp(logterm);
    }
    if (r == q) return;
    for (long v = prev; v >= 1; --v) {
      rows.push_back(v);
      rec(r + 1, v);
      rows.pop_back();
    }
  };
  rec(0, ell);
  return sum;
}

// Same law through the h-coordinate sum with its explicit normalization.
inline Real geometric_lpp_cdf_h(long p, long q, Real xi, long ell) {
  if (q > p) std::swap(p, q);
  detail::LogGamma lg(p + ell + q + 2);
  Real log_xi = std::log(xi);
  Real log_z = static_cast<Real>(q) * static_cast<Real>(q - 1) / 2 * log_xi -
               static_cast<Real>(p) * static_cast<Real>(q) * std::log1p(-xi) + lg.fact(q);
  for (long j = 0; j < q; ++j) log_z += lg.fact(j) + lg.fact(p - q + j);

  Real sum = 0.0L;
  std::vector<long> h(static_cast<std::size_t>(q));
  // strictly decreasing tuples h_1 > ... > h_q >= 0, times q! for orderings
  std::function<void(long, long)> rec = [&](long i, long hi_max) {
    if (i == q) {
      Real logterm = lg.fact(q);
      for (long a = 0; a < q; ++a) {
        for (long b = a + 1; b < q; ++b)
          logterm += 2.0L * std::log(static_cast<Real>(h[static_cast<std::size_t>(a)] -
                                                       h[static_cast<std::size_t>(b)]));
        long ha = h[static_cast<std::size_t>(a)];
        logterm += static_cast<Real>(ha) * log_xi + lg.fact(ha + p - q) - lg.fact(ha);
      }
      sum += std::exp(logterm - log_z);
      return;
    }
    for (long v = hi_max; v >= q - 1 - i; --v) {
      h[static_cast<std::size_t>(i)] = v;
      rec(i + 1, v - 1);
    }
  };
  rec(0, ell + q - 1);
  return sum;
}

// Distribution of the optimal right/down path sum over a p x q matrix of
// i.i.d. geometric(xi) entries. Both independent summation routes are
// evaluated and must agree.
inline Real geometric_lpp_cdf(long p, long q, Real xi, long ell) {
  if (!(xi > 0.0L && xi < 1.0L))
    throw std::invalid_argument("geometric_lpp_cdf: xi must lie in (0,1)");
  if (p < 1 || q < 1 || ell < 0)
    throw std::invalid_argument("geometric_lpp_cdf: need p,q >= 1, ell >= 0");
  Real a = geometric_lpp_cdf_schur(p, q, xi, ell);
  Real b = geometric_lpp_cdf_h(p, q, xi, ell);
  if (std::fabs(a - b) > 1e-9L)
    throw numeric_error("geometric_lpp_cdf: Schur and h-coordinate routes disagree");
  return a;
}

// e^{-xi} sum_m xi^m/m! P(L_m <= k). n_cap < 0 picks the cap from the
// Poisson tail; the tail bound is geometric beyond the mode.
inline Real poissonized_plancherel_cdf(Real xi, long n_cap, long k) {
  if (!(xi > 0.0L)) throw std::invalid_argument("poissonized_plancherel_cdf: xi must be > 0");
  if (k < 1) throw std::invalid_argument("poissonized_plancherel_cdf: k must be >= 1");
  if (n_cap < 0) {
    const Real tol = 1e-14L;
    long m = static_cast<long>(xi) + 1;
    Real logterm;
    do {
      ++m;
      logterm = -xi + static_cast<Real>(m) * std::log(xi) - std::lgamma(static_cast<Real>(m + 1));
      // geometric bound on the remaining tail once m+2 > xi
    } while (!(static_cast<Real>(m + 2) > xi &&
               std::exp(logterm) / (1.0L - xi / static_cast<Real>(m + 2)) < tol));
    n_cap = m;
  }
  Real sum = 0.0L;
  Real logw = -xi;  // log of e^{-xi} xi^m / m! at m=0
  for (long m = 0; m <= n_cap; ++m) {
    if (m > 0) logw += std::log(xi) - std::log(static_cast<Real>(m));
    Real cdf = (m == 0) ? 1.0L : to_real(perm_lis_cdf(m, k));
    sum += std::exp(logw) * cdf;
  }
  return sum;
}

// Sandwich bounds: F evaluated at the two displaced Poisson parameters, with
// the caller-supplied constant C (the lemma asserts existence only).
inline std::pair<Real, Real> depoissonization_bracket(
    long k, const std::function<Real(Real)>& F, Real C) {
  if (k < 1) throw std::invalid_argument("depoissonization_bracket: k must be >= 1");
  Real kk = static_cast<Real>(k);
  Real shift = 4.0L * std::sqrt(kk * std::log(kk));
  if (kk - shift <= 0.0L)
    throw std::invalid_argument("depoissonization_bracket: k too small, lower point nonpositive");
  Real c2 = C / (kk * kk);
  return {F(kk + shift) - c2, F(kk - shift) + c2};
}

// f^{lambda\mu} = |lambda\mu|! det( 1/(lambda_i - mu_j - i + j)! )
inline BigInt skew_dim_standard(const Partition& l, const Partition& mu, long rows) {
  long cells = l.weight() - mu.weight();
  std::size_t m = static_cast<std::size_t>(rows);
  std::vector<std::vector<Rational>> a(m, std::vector<Rational>(m));
  for (std::size_t i = 1; i <= m; ++i)
    for (std::size_t j = 1; j <= m; ++j) {
      long arg = l.part(i) - mu.part(j) - static_cast<long>(i) + static_cast<long>(j);
      a[i - 1][j - 1] =
          (arg < 0) ? Rational(0)
                    : make_rational(BigInt(1), factorial(static_cast<std::uint64_t>(arg)));
    }
  // exact Gaussian elimination
  Rational det(1);
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t piv = c;
    while (piv < m && a[piv][c] == 0) ++piv;
    if (piv == m) return 0;
    if (piv != c) { std::swap(a[piv], a[c]); det = -det; }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < m; ++r) {
      if (a[r][c] == 0) continue;
      Rational f = a[r][c] / a[c][c];
      for (std::size_t cc = c; cc < m; ++cc) a[r][cc] -= f * a[c][cc];
    }
  }
  det *= Rational(factorial(static_cast<std::uint64_t>(cells)));
  if (det.get_den() != 1) throw numeric_error("skew_dim_standard: non-integer determinant");
  return det.get_num();
}

// Number of ways m walkers starting at x_1 < ... < x_m (one walker steps
// left or right per tick) reach y_1 < ... < y_m after T ticks without two
// ever sharing a site. Probability = count / (2m)^T.
inline BigInt walk_count_general(const std::vector<long>& x, const std::vector<long>& y, long T) {
  if (x.size() != y.size() || x.empty())
    throw std::invalid_argument("walk_count_general: mismatched walker lists");
  long m = static_cast<long>(x.size());
  std::vector<long> mu_parts(x.size()), nu_parts(y.size());
  for (long k = 1; k <= m; ++k) {
    mu_parts[static_cast<std::size_t>(k - 1)] = k - 1 - x[static_cast<std::size_t>(k - 1)];
    nu_parts[static_cast<std::size_t>(k - 1)] = k - 1 - y[static_cast<std::size_t>(k - 1)];
  }
  Partition mu, nu;
  try {
    mu = Partition(std::move(mu_parts));
    nu = Partition(std::move(nu_parts));
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("walk_count_general: k-1-x_k and k-1-y_k must form partitions");
  }
  long delta = nu.weight() - mu.weight();
  if ((T + delta) % 2 != 0 || std::abs(delta) > T) return 0;
  long tl = (T + delta) / 2;  // |lambda\mu| ; |lambda\nu| = T - tl
  BigInt total = 0;
  for (const auto& l : partitions_of(mu.weight() + tl, std::nullopt, m)) {
    bool contains = true;
    for (long i = 1; i <= m; ++i)
      if (l.part(static_cast<std::size_t>(i)) < mu.part(static_cast<std::size_t>(i)) ||
          l.part(static_cast<std::size_t>(i)) < nu.part(static_cast<std::size_t>(i))) {
        contains = false;
        break;
      }
    if (!contains) continue;
    total += skew_dim_standard(l, mu, m) * skew_dim_standard(l, nu, m);
  }
  return binomial(static_cast<std::uint64_t>(T), static_cast<std::uint64_t>(tl)) * total;
}

// Close-packed case: walkers at 0..m-1 return to 0..m-1 in 2n ticks.
inline Rational walk_return_probability(long m, long n) {
  if (m < 1 || n < 0) throw std::invalid_argument("walk_return_probability: bad arguments");
  BigInt sum = 0;
  for (const auto& l : partitions_of(n, std::nullopt, m)) {
    BigInt f = dim_standard(l);
    sum += f * f;
  }
  BigInt paths;
  mpz_ui_pow_ui(paths.get_mpz_t(), static_cast<unsigned long>(2 * m),
                static_cast<unsigned long>(2 * n));
  return make_rational(binomial(static_cast<std::uint64_t>(2 * n),
                                static_cast<std::uint64_t>(n)) * sum,
                       paths);
}

}  // namespace rmt
