#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace glauber {

/// Upper bound on worker threads used by replica loops. Defaults to the
/// hardware concurrency; 1 runs everything on the calling thread.
std::size_t worker_count();
void set_worker_count(std::size_t n);

/// Calls fn(i) for every i in [0, n) on a bounded pool of threads. Indices
/// are handed out in contiguous chunks; the first exception thrown by any
/// call is rethrown on the calling thread after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Results are stored by index, so the output is independent of scheduling.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, Fn&& fn) {
  std::vector<T> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace glauber
