// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstddef>
#include <functional>

namespace pmgp {

int hardware_threads();

/// Runs fn(i) for i in [0, count) on up to n_threads workers. Each work item
/// must write only to its own output slot; the first exception thrown by a
/// worker is rethrown on the calling thread after all workers join.
void parallel_for(std::size_t count, int n_threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace pmgp
