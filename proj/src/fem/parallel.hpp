#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace rivet::fem {

/// Worker count for element loops, from RIVET_THREADS (default 1).
inline int assembly_threads() {
  if (const char* v = std::getenv("RIVET_THREADS")) {
    const int n = std::atoi(v);
    if (n > 0) return std::min(n, 256);
  }
  return 1;
}

/// Split [0, n) into contiguous chunks, run `body(chunk, begin, end)` on each
/// (concurrently when more than one worker is configured), and return the
/// chunk count. Callers merge per-chunk results in chunk order, so the
/// reduction order depends only on the worker count.
template <class Body>
int for_each_chunk(int n, Body&& body) {
  const int workers = std::max(1, std::min(assembly_threads(), n));
  if (workers == 1) {
    body(0, 0, n);
    return 1;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int c = 0; c < workers; ++c) {
    const int b = static_cast<int>(static_cast<long long>(n) * c / workers);
    const int e = static_cast<int>(static_cast<long long>(n) * (c + 1) / workers);
    pool.emplace_back([&body, c, b, e] { body(c, b, e); });
  }
  for (auto& t : pool) t.join();
  return workers;
}

}  // namespace rivet::fem
