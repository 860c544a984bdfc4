#ifndef MVEM_PARALLEL_HPP_
#define MVEM_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace mvem {

// MVEM_THREADS if set (>= 1), else hardware concurrency
int thread_count();

// Runs fn(i) for i in [0, n). Work is split into contiguous chunks; the first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int threads = 0);

}  // namespace mvem

#endif
