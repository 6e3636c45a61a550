#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace pregi {

/// Default worker count: PREGI_WORKERS env var, else 1.
inline int default_workers()
{
  if (const char* env = std::getenv("PREGI_WORKERS"))
  {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

/// Static block partition of [0, n) across `workers` threads.
/// Results must be written to disjoint slots so the outcome is
/// independent of the partitioning.
inline void parallel_for(size_t n, int workers, const std::function<void(size_t, size_t)>& body)
{
  if (n == 0) return;
  if (workers <= 1 || n == 1)
  {
    body(0, n);
    return;
  }
  const size_t nthreads = std::min<size_t>(workers, n);
  const size_t chunk = (n + nthreads - 1) / nthreads;
  std::vector<std::thread> threads;
  threads.reserve(nthreads);
  for (size_t t = 0; t < nthreads; ++t)
  {
    const size_t begin = t * chunk;
    const size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&body, begin, end] { body(begin, end); });
  }
  for (auto& th : threads) th.join();
}

}  // namespace pregi
