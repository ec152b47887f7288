#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace vbhmm::detail {

// Worker cap from VBHMM_THREADS (0 or unset/garbage = hardware concurrency).
inline int worker_threads() {
  int cap = 0;
  if (const char* env = std::getenv("VBHMM_THREADS")) {
    cap = std::atoi(env);
  }
  if (cap <= 0) {
    cap = static_cast<int>(std::thread::hardware_concurrency());
    if (cap <= 0) cap = 1;
  }
  return cap;
}

// Runs fn(i) for i in [0, count). Results must be written to per-index slots;
// the caller then reduces in index order, so scheduling never affects output.
template <typename Fn>
void parallel_for_index(int count, Fn&& fn) {
  const int workers = std::min(worker_threads(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::atomic<int> next{0};
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace vbhmm::detail
