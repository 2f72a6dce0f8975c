#pragma once

#include <cstddef>
#include <functional>

namespace sigmalab {

// Hardware concurrency, capped by the SIGMA_LAB_THREADS environment variable
// when it holds a positive integer. Always at least 1.
unsigned worker_count();

// Runs fn(i) for i in [0, count) on up to `workers` threads. The first
// exception thrown by any task is rethrown after all threads join.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn);

}  // namespace sigmalab
