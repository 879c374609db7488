#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <string>

namespace rmt {

// Exact arithmetic: arbitrary-precision integers and reduced rationals.
// GMP's C++ classes already enforce the invariants we need (canonical sign,
// gcd-reduced form) once canonicalize() has run.
using BigInt = mpz_class;
using Rational = mpq_class;

inline Rational make_rational(const BigInt& num, const BigInt& den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline Rational make_rational(long num, long den = 1) {
  return make_rational(BigInt(num), BigInt(den));
}

inline BigInt factorial(std::uint64_t n) {
  BigInt f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return f;
}

inline BigInt binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  BigInt b;
  mpz_bin_uiui(b.get_mpz_t(), n, k);
  return b;
}

// Serialized form used everywhere: "p/q", or just "p" when q = 1.
inline std::string to_string(const Rational& r) { return r.get_str(); }

inline long double to_real(const BigInt& z) {
  if (z == 0) return 0.0L;
  BigInt a = abs(z);
  std::size_t bits = mpz_sizeinbase(a.get_mpz_t(), 2);
  long double x;
  if (bits <= 64) {
    x = static_cast<long double>(a.get_ui());
  } else {
    BigInt top = a >> (bits - 64);
    x = std::ldexp(static_cast<long double>(top.get_ui()),
                   static_cast<int>(bits - 64));
  }
  return sgn(z) < 0 ? -x : x;
}

// mpq_get_d would round through double; go via a 192-bit scaled integer
// quotient so the full long double mantissa is meaningful.
inline long double to_real(const Rational& r) {
  if (r.get_num() == 0) return 0.0L;
  BigInt scaled = r.get_num() << 192;
  BigInt q = scaled / r.get_den();
  return std::ldexp(to_real(q), -192);
}

inline double to_double(const Rational& r) {
  return static_cast<double>(to_real(r));
}

}  // namespace rmt
