#pragma once

#include <cstddef>
#include <functional>

namespace fluxmech {

/// Worker count for grid evaluations: the FLUXMECH_THREADS environment
/// variable when set to a positive integer, otherwise the hardware
/// concurrency (at least 1).
[[nodiscard]] int worker_count();

/// Runs fn(i) for every i in [0, n), splitting the range into contiguous
/// chunks across worker_count() threads. Each call must write only to its
/// own output slot, so the result is identical for any worker count. The
/// first exception thrown by any worker is rethrown after all join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace fluxmech
