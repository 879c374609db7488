#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace rmt {

using Real = long double;

struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline int thread_count() {
  if (const char* s = std::getenv("RMT_LAB_THREADS")) {
    char* end = nullptr;
    long n = std::strtol(s, &end, 10);
    if (end != s && n >= 1) return static_cast<int>(n);
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

// Deterministic parallel map-reduce: [0,n) is cut into fixed chunks, each
// chunk produces a value of T, and the values are folded in chunk order no
// matter which thread ran them. Keeps floating-point output reproducible.
template <class T, class Map, class Fold>
T parallel_map_reduce(std::int64_t n, std::int64_t chunk_size, T init,
                      Map map_chunk, Fold fold) {
  if (n <= 0) return init;
  if (chunk_size < 1) chunk_size = 1;
  std::int64_t nchunks = (n + chunk_size - 1) / chunk_size;
  int workers = thread_count();
  if (workers > nchunks) workers = static_cast<int>(nchunks);

  std::vector<T> results(static_cast<std::size_t>(nchunks), init);
  if (workers <= 1) {
    for (std::int64_t c = 0; c < nchunks; ++c) {
      std::int64_t lo = c * chunk_size;
      std::int64_t hi = std::min(n, lo + chunk_size);
      results[static_cast<std::size_t>(c)] = map_chunk(lo, hi);
    }
  } else {
    std::atomic<std::int64_t> next{0};
    auto worker = [&] {
      for (;;) {
        std::int64_t c = next.fetch_add(1);
        if (c >= nchunks) return;
        std::int64_t lo = c * chunk_size;
        std::int64_t hi = std::min(n, lo + chunk_size);
        results[static_cast<std::size_t>(c)] = map_chunk(lo, hi);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  T acc = init;
  for (auto& r : results) acc = fold(acc, r);
  return acc;
}

}  // namespace rmt
