#pragma once

#include <cstddef>
#include <functional>

namespace dfgr {

/// Worker count: set_thread_count() if called, else DFGR_THREADS, else the
/// hardware concurrency.
int thread_count();
void set_thread_count(int n);

/// Runs body(i) for i in [0, n) on thread_count() workers.  Results must be
/// written by index; if any call throws, the exception from the lowest failing
/// index is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace dfgr
