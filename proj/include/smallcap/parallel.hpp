#pragma once

#include <cstddef>
#include <functional>

namespace smallcap {

/// Number of worker threads used by the parallel loops below (default 1).
unsigned worker_count();
void set_worker_count(unsigned workers);

/// Runs body(chunk) for chunk in [0, chunks). Chunks are handed out to
/// worker_count() threads; callers reduce per-chunk results in chunk order so
/// the answer does not depend on the thread count.
void parallel_chunks(std::size_t chunks, const std::function<void(std::size_t)>& body);

}  // namespace smallcap
