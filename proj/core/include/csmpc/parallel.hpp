#pragma once

#include <cstddef>
#include <functional>

namespace csmpc {

/// Worker count: hardware concurrency, capped by the CSMPC_THREADS
/// environment variable when set to a positive integer.
std::size_t worker_count();

/// Runs fn(i) for i in [0, n). Each index runs exactly once; callers write
/// results into slot i so the output does not depend on scheduling.
/// The first exception thrown by any task is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace csmpc
