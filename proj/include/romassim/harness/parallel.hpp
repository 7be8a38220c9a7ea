#pragma once

#include <cstddef>
#include <functional>

namespace romassim::harness {

/// Worker cap: ROMASSIM_THREADS if set and positive, else the hardware count.
std::size_t worker_count();

/// Calls fn(i) for i in [0, n) on up to worker_count() threads. Work is
/// split into fixed contiguous blocks, so results written to slot i do not
/// depend on scheduling. The exception of the lowest failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace romassim::harness
