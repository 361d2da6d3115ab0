#pragma once

#include <cstddef>
#include <functional>

namespace ergolab {

/// Worker count: ERGOLAB_JOBS if set, else hardware concurrency (at least 1).
std::size_t default_jobs();

/// Calls fn(i) for i in [0, count) on up to `jobs` threads. Results must be
/// written to per-index slots so the outcome does not depend on scheduling.
/// The first exception thrown by any call is rethrown.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn);

}  // namespace ergolab
