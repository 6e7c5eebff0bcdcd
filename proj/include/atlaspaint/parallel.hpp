#pragma once

#include <cstddef>
#include <functional>

namespace atlaspaint {

// Worker cap: ATLASPAINT_THREADS when set to a positive integer, otherwise the
// hardware parallelism (at least 1).
unsigned worker_count();

// Runs task(i) for i in [0, count) on up to `threads` threads and waits for
// all of them. If any task throws, the exception of the lowest failing index
// is rethrown after every task has finished.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task);

}  // namespace atlaspaint
