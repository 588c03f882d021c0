#pragma once

#include <cstddef>
#include <functional>

namespace wfdelay {

// Worker count: WFDELAY_THREADS if set to a positive integer, else the hardware concurrency.
int thread_count();

// Runs body(0..n-1) on up to thread_count() threads. Each index is processed exactly once,
// so callers writing results by index get the same output for any thread count.
// If bodies throw, the exception of the lowest failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace wfdelay
