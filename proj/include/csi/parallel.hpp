#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace csi {

// Runs fn(replica_index) for indices [0, count). Results must be written to
// preallocated per-replica slots so that the final reduction order (and thus
// every reported number) is independent of the job count.
template <typename Fn>
void parallel_replicas(std::int64_t count, int jobs, Fn&& fn) {
  if (jobs <= 1 || count < 2) {
    for (std::int64_t r = 0; r < count; ++r) fn(r);
    return;
  }
  const int J = static_cast<int>(std::min<std::int64_t>(jobs, count));
  std::vector<std::thread> pool;
  pool.reserve(J);
  for (int t = 0; t < J; ++t) {
    pool.emplace_back([&, t]() {
      for (std::int64_t r = t; r < count; r += J) fn(r);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace csi
