#pragma once

#include <cstddef>
#include <functional>

namespace droso {

/// Worker cap: DROSO_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
std::size_t worker_count();

/// Calls fn(i) for i in [0, count) across worker_count() threads. The first
/// exception thrown by any call is rethrown after all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace droso
