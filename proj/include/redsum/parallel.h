#ifndef REDSUM_PARALLEL_H_
#define REDSUM_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace redsum {

/// REDSUM_THREADS when set to a positive integer, else the hardware concurrency (at least 1).
std::size_t default_threads();

/// Runs fn(0..n-1) on up to `threads` workers with static striping. Results
/// must be written by index, which keeps output independent of the thread
/// count. The first exception thrown by any task is rethrown.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace redsum

#endif  // REDSUM_PARALLEL_H_
