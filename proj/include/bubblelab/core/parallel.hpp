#pragma once

#include <cstddef>
#include <functional>

namespace bubblelab {

/// Runs task(i) for i in [0, n_tasks) on up to n_workers threads pulling from
/// a shared atomic counter. Tasks must write only to their own pre-allocated
/// result slots; with that discipline the combined result is identical for
/// every worker count (reductions happen afterwards in index order).
/// n_workers <= 1 runs inline. The first exception thrown by any task is
/// rethrown on the calling thread after all workers join.
void parallel_for(std::size_t n_tasks, unsigned n_workers,
                  const std::function<void(std::size_t)>& task);

}  // namespace bubblelab
