#pragma once

#include <cstddef>
#include <functional>

namespace qgraph {

// Number of worker threads used by parallel_for. Defaults to the hardware
// concurrency, capped by the QGRAPH_THREADS environment variable when set.
int worker_count();

// Runs fn(i) for i in [0, n). Iterations must be independent; results should
// be written to preallocated slots indexed by i so the outcome does not
// depend on scheduling. Nested calls run serially to avoid oversubscription.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace qgraph
