#pragma once

#include <cstddef>
#include <functional>

namespace scherk {

// Number of worker threads. Reads SCHERK_WORKERS when set, otherwise the
// hardware concurrency. Always >= 1.
unsigned worker_count();

// Overrides the worker count for the current process (0 restores the default).
void set_worker_count(unsigned workers);

// Runs body(i) for i in [0, n). Work is split into contiguous blocks; callers
// write into per-index slots and reduce serially, so results never depend on
// the number of workers.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace scherk
