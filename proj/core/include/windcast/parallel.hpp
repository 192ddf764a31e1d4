#pragma once

#include <cstddef>
#include <functional>

namespace windcast {

// Worker count resolution: explicit argument > WINDCAST_THREADS environment
// variable > hardware concurrency. Always at least 1.
int default_thread_count();
int resolve_thread_count(int requested);

// Runs fn(0..count-1) on up to `threads` workers pulling indices from a
// shared counter. Results must not depend on completion order; the first
// exception wins and is rethrown after all workers join.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace windcast
