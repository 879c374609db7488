#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rmtlab/common.hpp"
#include "rmtlab/rational.hpp"

namespace rmt {

// A partition: weakly decreasing positive parts, trailing zeros stripped.
struct Partition {
  std::vector<long> parts;

  Partition() = default;
  Partition(std::initializer_list<long> p) : parts(p) { normalize(); }
  explicit Partition(std::vector<long> p) : parts(std::move(p)) { normalize(); }

  void normalize() {
    while (!parts.empty() && parts.back() == 0) parts.pop_back();
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (parts[i] < 0 || (i + 1 < parts.size() && parts[i] < parts[i + 1]))
        throw std::invalid_argument("partition parts must be weakly decreasing and nonnegative");
    }
  }

  long weight() const {
    long w = 0;
    for (long p : parts) w += p;
    return w;
  }
  std::size_t length() const { return parts.size(); }
  // part(i) is 1-based and 0 beyond the last row
  long part(std::size_t i) const {
    return (i >= 1 && i <= parts.size()) ? parts[i - 1] : 0;
  }
  bool empty() const { return parts.empty(); }

  friend bool operator==(const Partition&, const Partition&) = default;
  friend auto operator<=>(const Partition&, const Partition&) = default;
};

inline Partition transpose(const Partition& l) {
  std::vector<long> t;
  if (l.empty()) return Partition{};
  t.assign(static_cast<std::size_t>(l.parts[0]), 0);
  for (std::size_t i = 1; i <= static_cast<std::size_t>(l.parts[0]); ++i) {
    long cnt = 0;
    for (long p : l.parts) cnt += (p >= static_cast<long>(i)) ? 1 : 0;
    t[i - 1] = cnt;
  }
  return Partition(std::move(t));
}

// Hook product over cells, cross-checked against the factorial-ratio form
// prod_i (m+l_i-i)! / prod_{i<j} ((l_i-i)-(l_j-j)) with m = number of rows.
inline BigInt hook_product_factorial(const Partition& l, long m) {
  if (m < static_cast<long>(l.length()))
    throw std::invalid_argument("factorial form needs m >= number of rows");
  BigInt num = 1, den = 1;
  for (long i = 1; i <= m; ++i)
    num *= factorial(static_cast<std::uint64_t>(m + l.part(static_cast<std::size_t>(i)) - i));
  for (long i = 1; i <= m; ++i)
    for (long j = i + 1; j <= m; ++j)
      den *= (l.part(static_cast<std::size_t>(i)) - i) - (l.part(static_cast<std::size_t>(j)) - j);
  BigInt q, r;
  mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  if (r != 0) throw numeric_error("hook factorial form: non-exact division");
  return q;
}

// Above this many rows the quadratic-cost cross-check forms are skipped;
// the forms are still asserted equal for every shape of weight <= 30 in the
// test suite.
inline constexpr long kCrossCheckRowLimit = 48;

inline BigInt hook_product(const Partition& l) {
  Partition t = transpose(l);
  BigInt prod = 1;
  for (std::size_t i = 1; i <= l.length(); ++i)
    for (std::size_t j = 1; j <= static_cast<std::size_t>(l.parts[i - 1]); ++j)
      prod *= l.part(i) + t.part(j) - static_cast<long>(i) - static_cast<long>(j) + 1;
  if (static_cast<long>(l.length()) <= kCrossCheckRowLimit) {
    BigInt alt = hook_product_factorial(l, static_cast<long>(l.length()));
    if (prod != alt) throw numeric_error("hook product: cell and factorial forms disagree");
  }
  return prod;
}

// Number of standard tableaux f^lambda, by n!/hooks and independently by the
// Vandermonde ratio n! * Delta_m(m+l_i-i) / prod (m+l_i-i)!.
inline BigInt dim_standard(const Partition& l) {
  BigInt nfact = factorial(static_cast<std::uint64_t>(l.weight()));
  BigInt h = hook_product(l);
  BigInt f, r;
  mpz_tdiv_qr(f.get_mpz_t(), r.get_mpz_t(), nfact.get_mpz_t(), h.get_mpz_t());
  if (r != 0) throw numeric_error("dim_standard: non-exact division");

  long m = static_cast<long>(l.length());
  if (m <= kCrossCheckRowLimit) {
    BigInt num = nfact, den = 1;
    for (long i = 1; i <= m; ++i)
      for (long j = i + 1; j <= m; ++j)
        num *= (l.part(static_cast<std::size_t>(i)) - i) - (l.part(static_cast<std::size_t>(j)) - j);
    for (long i = 1; i <= m; ++i)
      den *= factorial(static_cast<std::uint64_t>(m + l.part(static_cast<std::size_t>(i)) - i));
    BigInt f2, r2;
    mpz_tdiv_qr(f2.get_mpz_t(), r2.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    if (r2 != 0 || f2 != f) throw numeric_error("dim_standard: Vandermonde form disagrees");
  }
  return f;
}

// Number of semistandard tableaux with entries from q letters,
// s_lambda(1^q) = Delta_q(q+l_i-i) / prod_{j<q} j!; zero when q < #rows.
inline BigInt dim_semistandard(const Partition& l, long q) {
  if (q < 1) throw std::invalid_argument("dim_semistandard: q must be >= 1");
  if (static_cast<long>(l.length()) > q) return 0;
  BigInt num = 1, den = 1;
  for (long i = 1; i <= q; ++i)
    for (long j = i + 1; j <= q; ++j)
      num *= (l.part(static_cast<std::size_t>(i)) - i) - (l.part(static_cast<std::size_t>(j)) - j);
  for (long j = 1; j < q; ++j) den *= factorial(static_cast<std::uint64_t>(j));
  BigInt s, r;
  mpz_tdiv_qr(s.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  if (r != 0) throw numeric_error("dim_semistandard: non-exact division");

  // per-cell cross-check: product of (q + j - i)/hook over cells
  Partition t = transpose(l);
  Rational alt(1);
  for (std::size_t i = 1; i <= l.length(); ++i)
    for (std::size_t j = 1; j <= static_cast<std::size_t>(l.parts[i - 1]); ++j) {
      long content = static_cast<long>(j) - static_cast<long>(i);
      long hook = l.part(i) + t.part(j) - static_cast<long>(i) - static_cast<long>(j) + 1;
      alt *= make_rational(q + content, hook);
    }
  if (alt != Rational(s)) throw numeric_error("dim_semistandard: content form disagrees");
  return s;
}

inline Rational plancherel_mass(const Partition& l) {
  long n = l.weight();
  if (n < 1) throw std::invalid_argument("plancherel_mass: weight must be >= 1");
  BigInt f = dim_standard(l);
  return make_rational(f * f, factorial(static_cast<std::uint64_t>(n)));
}

inline bool adds_one_box(const Partition& l, const Partition& m) {
  if (m.length() < l.length() || m.length() > l.length() + 1) return false;
  int grown = 0;
  for (std::size_t i = 1; i <= m.length(); ++i) {
    long d = m.part(i) - l.part(i);
    if (d == 1) ++grown;
    else if (d != 0) return false;
  }
  return grown == 1;
}

inline Rational transition_prob(const Partition& l, const Partition& m) {
  if (m.weight() != l.weight() + 1)
    throw std::invalid_argument("transition_prob: weight of mu must exceed weight of lambda by 1");
  if (!adds_one_box(l, m)) return Rational(0);
  return make_rational(dim_standard(m), dim_standard(l) * BigInt(m.weight()));
}

inline Real omega_curve(Real u) {
  const Real pi = 3.14159265358979323846264338327950288L;
  Real a = std::fabs(u);
  if (a >= 2.0L) return a;
  return (2.0L / pi) * (u * std::asin(u / 2.0L) + std::sqrt(4.0L - u * u));
}

// Reverse-lexicographic stream over partitions of n, optionally bounded by
// largest part and number of parts.
class PartitionStream {
 public:
  explicit PartitionStream(long n, std::optional<long> max_part = std::nullopt,
                           std::optional<long> max_length = std::nullopt)
      : remaining_(n),
        max_part_(max_part.value_or(std::numeric_limits<long>::max())),
        max_length_(max_length.value_or(-1)) {
    if (n < 0) throw std::invalid_argument("partitions_of: n must be >= 0");
    if (max_part_ < 0 || (max_length && *max_length < 0))
      throw std::invalid_argument("partitions_of: bounds must be >= 0");
  }

  std::optional<Partition> next() {
    if (done_) return std::nullopt;
    if (!started_) {
      started_ = true;
      if (remaining_ == 0) return Partition{};
      if (descend()) return Partition(cur_);
      done_ = true;
      return std::nullopt;
    }
    while (!cur_.empty()) {
      long k = cur_.back();
      cur_.pop_back();
      remaining_ += k;
      for (long kk = k - 1; kk >= 1; --kk) {
        if (!completable(kk)) continue;
        cur_.push_back(kk);
        remaining_ -= kk;
        if (descend()) return Partition(cur_);
        cur_.pop_back();
        remaining_ += kk;
      }
    }
    done_ = true;
    return std::nullopt;
  }

 private:
  long slots_left() const {
    return max_length_ < 0 ? std::numeric_limits<long>::max()
                           : max_length_ - static_cast<long>(cur_.size());
  }
  // can a part of size kk be placed here and the rest still be finished?
  bool completable(long kk) const {
    long s = slots_left();
    if (s <= 0 || kk > remaining_) return false;
    long rem = remaining_ - kk;
    if (rem == 0) return true;
    long s2 = s - 1;
    return s2 > 0 && rem <= kk * std::min(s2, rem);
  }
  // greedily place the largest feasible parts until the weight is used up
  bool descend() {
    while (remaining_ > 0) {
      long cap = cur_.empty() ? max_part_ : cur_.back();
      long k = std::min(cap, remaining_);
      while (k >= 1 && !completable(k)) --k;
      if (k < 1) return false;
      cur_.push_back(k);
      remaining_ -= k;
    }
    return true;
  }

  std::vector<long> cur_;
  long remaining_;
  long max_part_;
  long max_length_;
  bool started_ = false;
  bool done_ = false;
};

inline std::vector<Partition> partitions_of(
    long n, std::optional<long> max_part = std::nullopt,
    std::optional<long> max_length = std::nullopt) {
  PartitionStream s(n, max_part, max_length);
  std::vector<Partition> out;
  while (auto l = s.next()) out.push_back(std::move(*l));
  return out;
}

}  // namespace rmt
