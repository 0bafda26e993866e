#pragma once

#include <cstddef>
#include <functional>

namespace sslse {

/// Worker cap: SSLSE_THREADS if set and positive, otherwise the hardware
/// concurrency (at least 1).
std::size_t worker_count();

/// Runs fn(i) for i in [0, n). Iterations are split into contiguous chunks;
/// callers must write disjoint outputs so results never depend on the split.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace sslse
