#pragma once

#include <cstddef>
#include <functional>

namespace cfs {

/// Worker count from the CFS_THREADS environment variable, falling back to
/// the hardware concurrency (at least 1).
int default_thread_count();

/// Runs body(i) for i in [0, count) on up to `threads` workers. Indices are
/// handed out dynamically; callers that need deterministic results must
/// write into per-index slots. The exception thrown for the lowest index is
/// rethrown after all workers join.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace cfs
