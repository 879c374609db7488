#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "rmtlab/partition.hpp"

using rmt::BigInt;
using rmt::Partition;
using rmt::Rational;

TEST_CASE("transpose on fixed shapes") {
  CHECK(rmt::transpose(Partition{}) == Partition{});
  CHECK(rmt::transpose(Partition{2, 2}) == Partition{2, 2});
  CHECK(rmt::transpose(Partition{3, 1}) == Partition{2, 1, 1});
}

TEST_CASE("transpose is an involution and preserves weight") {
  for (long n = 0; n <= 10; ++n)
    for (const auto& l : rmt::partitions_of(n)) {
      Partition t = rmt::transpose(l);
      CHECK(t.weight() == l.weight());
      CHECK(rmt::transpose(t) == l);
    }
}

TEST_CASE("hook products on fixed shapes") {
  CHECK(rmt::hook_product(Partition{1}) == 1);
  CHECK(rmt::hook_product(Partition{5}) == rmt::factorial(5));
  CHECK(rmt::hook_product(Partition{2, 1}) == 3);
}

TEST_CASE("hook factorial form is independent of padding") {
  for (long n = 1; n <= 8; ++n)
    for (const auto& l : rmt::partitions_of(n)) {
      BigInt h = rmt::hook_product(l);
      long rows = static_cast<long>(l.length());
      for (long m = rows; m <= rows + 3; ++m)
        CHECK(rmt::hook_product_factorial(l, m) == h);
    }
}

TEST_CASE("standard tableau counts on fixed shapes") {
  CHECK(rmt::dim_standard(Partition{7}) == 1);
  CHECK(rmt::dim_standard(Partition{2, 1}) == 2);
}

TEST_CASE("standard tableau counts match direct enumeration") {
  for (long n = 1; n <= 10; ++n)
    for (const auto& l : rmt::partitions_of(n))
      CHECK(rmt::dim_standard(l) == oracle::count_standard_fillings(l));
}

TEST_CASE("standard tableau counts match the determinant form") {
  for (long n = 1; n <= 10; ++n)
    for (const auto& l : rmt::partitions_of(n))
      CHECK(rmt::dim_standard(l) == oracle::dim_standard_det(l));
}

TEST_CASE("squares of standard counts sum to n!") {
  for (long n = 1; n <= 12; ++n) {
    BigInt sum = 0;
    for (const auto& l : rmt::partitions_of(n)) {
      BigInt f = rmt::dim_standard(l);
      sum += f * f;
    }
    CHECK(sum == rmt::factorial(static_cast<std::uint64_t>(n)));
  }
}

TEST_CASE("semistandard counts on fixed shapes") {
  CHECK(rmt::dim_semistandard(Partition{1}, 3) == 3);
  CHECK(rmt::dim_semistandard(Partition{1, 1, 1}, 2) == 0);
  CHECK(rmt::dim_semistandard(Partition{2, 1}, 2) == 2);
}

TEST_CASE("semistandard counts match direct enumeration") {
  for (long n = 1; n <= 6; ++n)
    for (const auto& l : rmt::partitions_of(n))
      for (long q = 1; q <= 4; ++q)
        CHECK(rmt::dim_semistandard(l, q) == oracle::count_semistandard_fillings(l, q));
}

TEST_CASE("semistandard count vanishes exactly when the shape is too tall") {
  for (long n = 1; n <= 8; ++n)
    for (const auto& l : rmt::partitions_of(n))
      for (long q = 1; q <= 5; ++q) {
        bool zero = rmt::dim_semistandard(l, q) == 0;
        CHECK(zero == (static_cast<long>(l.length()) > q));
      }
}

TEST_CASE("plancherel mass on fixed shapes") {
  CHECK(rmt::plancherel_mass(Partition{1}) == Rational(1));
  CHECK(rmt::plancherel_mass(Partition{2, 1}) == rmt::make_rational(4, 6));
}

TEST_CASE("plancherel masses sum to one") {
  for (long n = 1; n <= 10; ++n) {
    Rational sum(0);
    for (const auto& l : rmt::partitions_of(n)) sum += rmt::plancherel_mass(l);
    CHECK(sum == Rational(1));
  }
}

TEST_CASE("plancherel tail is monotone in n") {
  // P(lambda_1 <= k) under Plancherel measure never increases with n
  long nmax = 10;
  for (long k = 1; k <= nmax; ++k) {
    Rational prev(1);
    for (long n = 1; n <= nmax; ++n) {
      Rational cdf(0);
      for (const auto& l : rmt::partitions_of(n, k))
        cdf += rmt::plancherel_mass(l);
      CHECK(cdf <= prev);
      prev = cdf;
    }
  }
}

TEST_CASE("transition probabilities on fixed shapes") {
  CHECK(rmt::transition_prob(Partition{1}, Partition{2}) == rmt::make_rational(1, 2));
  CHECK(rmt::transition_prob(Partition{2}, Partition{1, 1, 1}) == Rational(0));
  CHECK_THROWS_AS(rmt::transition_prob(Partition{1}, Partition{3}), std::invalid_argument);
}

TEST_CASE("transition probabilities sum to one over box additions") {
  for (long n = 1; n <= 10; ++n)
    for (const auto& l : rmt::partitions_of(n)) {
      Rational sum(0);
      for (const auto& m : rmt::partitions_of(n + 1))
        sum += rmt::transition_prob(l, m);
      CHECK(sum == Rational(1));
    }
}

TEST_CASE("limit shape curve") {
  const long double pi = 3.14159265358979323846264338327950288L;
  CHECK_THAT(static_cast<double>(rmt::omega_curve(0.0L)),
             Catch::Matchers::WithinAbs(4.0 / pi, 1e-15));
  CHECK_THAT(static_cast<double>(rmt::omega_curve(2.0L)),
             Catch::Matchers::WithinAbs(2.0, 1e-15));
  CHECK_THAT(static_cast<double>(rmt::omega_curve(-2.0L)),
             Catch::Matchers::WithinAbs(2.0, 1e-15));
  CHECK(rmt::omega_curve(3.0L) == 3.0L);
  // continuity across the branch point
  CHECK_THAT(static_cast<double>(rmt::omega_curve(2.0L - 1e-9L)),
             Catch::Matchers::WithinAbs(2.0, 1e-7));
}

TEST_CASE("partition enumeration") {
  CHECK(rmt::partitions_of(0) == std::vector<Partition>{Partition{}});
  CHECK(rmt::partitions_of(4).size() == 5);
  CHECK(rmt::partitions_of(4, std::nullopt, 2) ==
        std::vector<Partition>{Partition{4}, Partition{3, 1}, Partition{2, 2}});

  // reverse-lexicographic order, each partition exactly once
  auto ps = rmt::partitions_of(8);
  CHECK(ps.size() == 22);
  for (std::size_t i = 1; i < ps.size(); ++i) CHECK(ps[i - 1] > ps[i]);

  // bounds behave like filters
  for (long n = 0; n <= 9; ++n)
    for (long mp = 1; mp <= n + 1; ++mp)
      for (long ml = 1; ml <= n + 1; ++ml) {
        auto bounded = rmt::partitions_of(n, mp, ml);
        std::vector<Partition> filtered;
        for (const auto& l : rmt::partitions_of(n))
          if (l.part(1) <= mp && static_cast<long>(l.length()) <= ml)
            filtered.push_back(l);
        CHECK(bounded == filtered);
      }
}
