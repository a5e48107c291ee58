#pragma once

#include <cstddef>
#include <functional>

namespace longwave {

/// Worker count: LONGWAVE_THREADS if set (>= 1), else hardware concurrency.
unsigned worker_count();

/// Runs fn(0..n-1) on up to worker_count() threads. The first exception
/// thrown by any task is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace longwave
