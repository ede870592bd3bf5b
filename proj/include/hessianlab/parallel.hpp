#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace hessianlab {

/// Worker cap: HESSIANLAB_THREADS when set (clamped to [1, 64]), else the
/// hardware count. Results never depend on the cap; it only splits index
/// ranges whose bodies write to disjoint slots.
inline unsigned worker_count() {
  if (const char* env = std::getenv("HESSIANLAB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(std::min<long>(v, 64));
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Applies f(i) for i in [begin, end), split contiguously over workers.
template <typename F>
void parallel_for(std::size_t begin, std::size_t end, F&& f) {
  const std::size_t count = end > begin ? end - begin : 0;
  const unsigned workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(count, 1));
  if (workers <= 1 || count < 2048) {
    for (std::size_t i = begin; i < end; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = begin + w * chunk;
    const std::size_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &f] {
      for (std::size_t i = lo; i < hi; ++i) f(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace hessianlab
