#pragma once

#include <cstddef>
#include <functional>

namespace orient {

// Worker count for parallel sections: ORIENT_THREADS when set to a positive
// value, hardware concurrency otherwise (and 1 as a last resort).
unsigned worker_count();

// Runs fn(0..n-1) across workers; rethrows the first exception after all
// workers finish. Results must be written to per-index slots by the caller,
// which keeps output independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace orient
