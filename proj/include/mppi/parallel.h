#ifndef MPPI_PARALLEL_H_
#define MPPI_PARALLEL_H_

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace mppi {

// Resolves a requested worker count; 0 means one per hardware thread.
inline int ResolveWorkers(int requested) {
  if (requested > 0) return requested;
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

// Splits [0, n) into `workers` contiguous chunks and calls fn(begin, end) on
// each, the first chunk on the calling thread. fn must only write to state
// owned by its own index range.
template <typename Fn>
void ParallelFor(std::size_t n, int workers, Fn&& fn) {
  const std::size_t chunks =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  if (chunks <= 1) {
    if (n > 0) fn(std::size_t{0}, n);
    return;
  }
  const std::size_t base = n / chunks;
  const std::size_t extra = n % chunks;
  const auto bounds = [&](std::size_t c) {
    return c * base + std::min(c, extra);
  };
  std::vector<std::jthread> threads;
  threads.reserve(chunks - 1);
  for (std::size_t c = 1; c < chunks; ++c) {
    threads.emplace_back([&fn, b = bounds(c), e = bounds(c + 1)] { fn(b, e); });
  }
  fn(bounds(0), bounds(1));
}

}  // namespace mppi

#endif  // MPPI_PARALLEL_H_
