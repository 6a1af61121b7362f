#pragma once

#include <cstddef>
#include <functional>

namespace lemnika {

/// Number of worker threads used by batch evaluations. 0 means hardware
/// concurrency. Results never depend on this value: every parallel loop
/// writes into per-index slots and reductions happen afterwards in index
/// order.
void set_thread_count(unsigned threads);
unsigned thread_count();

/// Runs body(i) for i in [0, n), split into contiguous chunks.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace lemnika
