#pragma once

// Deterministic data-parallel helpers. Work is split into contiguous index
// ranges; each index writes only its own output slot, and any reduction is
// done afterwards in index order, so results do not depend on thread count.

#include <cstddef>
#include <functional>

namespace sagnacsr {

/// Name of the environment variable that caps the worker count.
inline constexpr const char* kThreadsEnvVar = "SAGNACSR_THREADS";

/// Worker count: hardware concurrency, capped by SAGNACSR_THREADS when set.
std::size_t worker_count();

/// Calls fn(i) for every i in [0, n). fn must not touch shared mutable state.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace sagnacsr
