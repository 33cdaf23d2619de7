#pragma once

#include <cstddef>
#include <functional>

namespace eprenorm {

/// Number of worker threads to use: `requested` if nonzero, otherwise the
/// hardware concurrency (at least 1).
unsigned resolve_threads(unsigned requested) noexcept;

/// Calls body(i) for every i in [0, n), split into contiguous chunks across up
/// to `threads` workers. Each index is visited exactly once; the first
/// exception thrown by any worker is rethrown on the caller's thread.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace eprenorm
