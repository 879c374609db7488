#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rmtlab/partition.hpp"

namespace rmt {

// A generalized permutation: lexicographically sorted pairs (i; j) with
// explicit alphabet bounds p and q. Plain words are biwords whose top row is
// 1..n; permutations additionally use each bottom letter once.
struct BiWord {
  std::vector<std::pair<long, long>> pairs;
  long p = 0;
  long q = 0;

  void validate() const {
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      auto [i, j] = pairs[k];
      if (i < 1 || i > p || j < 1 || j > q)
        throw std::invalid_argument("biword letter out of alphabet bounds");
      if (k > 0 && pairs[k - 1] > pairs[k])
        throw std::invalid_argument("biword pairs must be sorted lexicographically");
    }
  }
};

inline BiWord biword_from_word(const std::vector<long>& word, long q) {
  BiWord b;
  b.p = static_cast<long>(word.size());
  b.q = q;
  for (std::size_t k = 0; k < word.size(); ++k)
    b.pairs.emplace_back(static_cast<long>(k + 1), word[k]);
  return b;
}

inline BiWord biword_from_permutation(const std::vector<long>& perm) {
  return biword_from_word(perm, static_cast<long>(perm.size()));
}

struct TableauPair {
  std::vector<std::vector<long>> P, Q;
  long p = 0;
  long q = 0;

  Partition shape() const {
    std::vector<long> parts;
    parts.reserve(P.size());
    for (const auto& row : P) parts.push_back(static_cast<long>(row.size()));
    return Partition(parts);
  }
};

struct CountMatrix {
  std::vector<std::vector<long>> w;
  long p = 0;
  long q = 0;

  long total() const {
    long t = 0;
    for (const auto& row : w) for (long v : row) t += v;
    return t;
  }
};

namespace detail {

inline bool semistandard_valid(const std::vector<std::vector<long>>& t) {
  for (std::size_t r = 0; r < t.size(); ++r) {
    if (r + 1 < t.size() && t[r + 1].size() > t[r].size()) return false;
    for (std::size_t c = 0; c < t[r].size(); ++c) {
      if (c > 0 && t[r][c] < t[r][c - 1]) return false;
      if (r > 0 && t[r][c] <= t[r - 1][c]) return false;
    }
  }
  return true;
}

}  // namespace detail

// Row insertion; returns (row, column) of the cell added.
inline std::pair<std::size_t, std::size_t> rsk_insert(
    std::vector<std::vector<long>>& tab, long x) {
  for (std::size_t r = 0;; ++r) {
    if (r == tab.size()) {
      tab.push_back({x});
      return {r, 0};
    }
    auto& row = tab[r];
    auto it = std::upper_bound(row.begin(), row.end(), x);
    if (it == row.end()) {
      row.push_back(x);
      return {r, row.size() - 1};
    }
    std::swap(*it, x);  // bump the smallest entry strictly greater than x
  }
}

inline TableauPair rsk(const BiWord& b) {
  b.validate();
  TableauPair t;
  t.p = b.p;
  t.q = b.q;
  for (auto [i, j] : b.pairs) {
    auto [r, c] = rsk_insert(t.P, j);
    if (r == t.Q.size()) t.Q.emplace_back();
    if (c != t.Q[r].size()) throw numeric_error("rsk: recording tableau out of step");
    t.Q[r].push_back(i);
  }
  return t;
}

inline BiWord rsk_inverse(const TableauPair& t) {
  if (t.P.size() != t.Q.size())
    throw std::invalid_argument("rsk_inverse: P and Q shapes differ");
  for (std::size_t r = 0; r < t.P.size(); ++r)
    if (t.P[r].size() != t.Q[r].size())
      throw std::invalid_argument("rsk_inverse: P and Q shapes differ");
  if (!detail::semistandard_valid(t.P) || !detail::semistandard_valid(t.Q))
    throw std::invalid_argument("rsk_inverse: not a valid tableau pair");

  auto P = t.P;
  auto Q = t.Q;
  std::vector<std::pair<long, long>> rev;
  while (!P.empty()) {
    // most recent insertion: largest recording entry, rightmost cell on ties
    std::size_t br = 0, bc = 0;
    long best = std::numeric_limits<long>::min();
    for (std::size_t r = 0; r < Q.size(); ++r) {
      std::size_t c = Q[r].size() - 1;
      // only a row-end cell can be the last-added one
      if (Q[r][c] > best || (Q[r][c] == best && c > bc)) {
        best = Q[r][c];
        br = r;
        bc = c;
      }
    }
    long x = P[br][bc];
    P[br].pop_back();
    Q[br].pop_back();
    if (P[br].empty()) { P.pop_back(); Q.pop_back(); }
    for (std::size_t r = br; r-- > 0;) {
      auto& row = P[r];
      auto it = std::lower_bound(row.begin(), row.end(), x);
      if (it == row.begin())
        throw std::invalid_argument("rsk_inverse: reverse bump fell off a row");
      --it;  // rightmost entry strictly below x
      std::swap(*it, x);
    }
    rev.emplace_back(best, x);
  }
  BiWord b;
  b.p = t.p;
  b.q = t.q;
  b.pairs.assign(rev.rbegin(), rev.rend());
  b.validate();
  return b;
}

inline CountMatrix biword_to_matrix(const BiWord& b) {
  b.validate();
  CountMatrix m;
  m.p = b.p;
  m.q = b.q;
  m.w.assign(static_cast<std::size_t>(b.p), std::vector<long>(static_cast<std::size_t>(b.q), 0));
  for (auto [i, j] : b.pairs) ++m.w[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)];
  return m;
}

inline BiWord matrix_to_biword(const CountMatrix& m) {
  BiWord b;
  b.p = m.p;
  b.q = m.q;
  for (long i = 1; i <= m.p; ++i)
    for (long j = 1; j <= m.q; ++j) {
      long c = m.w[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)];
      if (c < 0) throw std::invalid_argument("matrix_to_biword: negative count");
      for (long r = 0; r < c; ++r) b.pairs.emplace_back(i, j);
    }
  return b;
}

struct PatienceResult {
  long length = 0;
  std::vector<std::vector<long>> piles;
};

// Patience sorting with the leftmost-pile rule. strict=true counts strictly
// increasing subsequences (permutations); strict=false weakly increasing
// (words). O(n log n) via binary search on pile tops.
inline PatienceResult longest_increasing(const std::vector<long>& word, bool strict) {
  PatienceResult res;
  std::vector<long> tops;
  for (long x : word) {
    // leftmost pile whose top blocks x: top >= x (strict) or top > x (weak)
    auto it = strict ? std::lower_bound(tops.begin(), tops.end(), x)
                     : std::upper_bound(tops.begin(), tops.end(), x);
    std::size_t idx = static_cast<std::size_t>(it - tops.begin());
    if (it == tops.end()) {
      tops.push_back(x);
      res.piles.emplace_back();
    } else {
      *it = x;
    }
    res.piles[idx].push_back(x);
  }
  res.length = static_cast<long>(tops.size());
  return res;
}

// Max over monotone right/down paths from (1,1) to (p,q) of the entry sum.
template <class T>
T optimal_path_weight(const std::vector<std::vector<T>>& w) {
  if (w.empty() || w[0].empty())
    throw std::invalid_argument("optimal_path_weight: empty matrix");
  std::size_t p = w.size(), q = w[0].size();
  std::vector<T> dp(q, T(0));
  for (std::size_t i = 0; i < p; ++i) {
    if (w[i].size() != q) throw std::invalid_argument("optimal_path_weight: ragged matrix");
    for (std::size_t j = 0; j < q; ++j) {
      T best = dp[j];                                   // from above
      if (j > 0 && dp[j - 1] > best) best = dp[j - 1];  // from the left
      if (i == 0 && j == 0) best = T(0);
      dp[j] = best + w[i][j];
    }
  }
  return dp[q - 1];
}

inline long optimal_path_weight(const CountMatrix& m) {
  return optimal_path_weight(m.w);
}

}  // namespace rmt
