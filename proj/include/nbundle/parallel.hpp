#pragma once

#include <cstddef>
#include <functional>

namespace nbundle {

/// Number of workers to use when the caller passes 0.
unsigned default_threads();

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 = hardware
/// concurrency). Work is handed out by an atomic counter, so results must be
/// written to per-index slots. The first exception thrown by a body is
/// rethrown after all workers have joined.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace nbundle
