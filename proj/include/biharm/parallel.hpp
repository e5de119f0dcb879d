#pragma once

#include <cstddef>
#include <functional>

namespace biharm {

/// Worker count: BIHARM_THREADS if set (>= 1), else the hardware concurrency.
unsigned worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. Each index is
/// handled exactly once, so results written per index are order-independent.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace biharm
