#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

#include "linalg.hpp"

namespace gt {

// Worker cap; GRASSTENSOR_THREADS overrides hardware concurrency.
inline int thread_budget() {
  if (const char* env = std::getenv("GRASSTENSOR_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

inline constexpr Index kReduceChunk = 64;

// Deterministic parallel sum over [0, n). `fold(acc, i)` adds item i into a
// chunk-local accumulator (items visited in index order inside a chunk) and
// `combine(total, part)` merges chunk results in chunk order, so the value is
// bit-identical for every thread count.
template <class Acc, class Fold, class Combine>
Acc chunked_reduce(Index n, const Acc& zero, Fold fold, Combine combine) {
  Acc total = zero;
  if (n <= 0) return total;
  const Index chunks = (n + kReduceChunk - 1) / kReduceChunk;
  const Index workers = std::min<Index>(thread_budget(), chunks);
  std::vector<Acc> partial(static_cast<std::size_t>(chunks), zero);
  auto run_chunk = [&](Index c) {
    Acc local = zero;
    const Index hi = std::min(n, (c + 1) * kReduceChunk);
    for (Index i = c * kReduceChunk; i < hi; ++i) fold(local, i);
    partial[static_cast<std::size_t>(c)] = std::move(local);
  };
  if (workers <= 1) {
    for (Index c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::atomic<Index> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (Index w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (Index c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) run_chunk(c);
      });
    for (auto& t : pool) t.join();
  }
  for (Index c = 0; c < chunks; ++c) combine(total, partial[static_cast<std::size_t>(c)]);
  return total;
}

}  // namespace gt
