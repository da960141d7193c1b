#pragma once

#include <cstddef>
#include <functional>

namespace sweptvol {

//! Worker count: SWEPTVOL_THREADS if set and positive, else hardware threads.
unsigned worker_count();

/*!
 * Run fn(i) for i in [0, n) on up to worker_count() threads.
 *
 * Indices are handed out in contiguous chunks; callers write results into
 * slot i so the output does not depend on scheduling. The first exception
 * thrown by any task is rethrown on the calling thread.
 */
void parallel_for(std::size_t n, std::function<void(std::size_t)> const& fn);

}  // namespace sweptvol
