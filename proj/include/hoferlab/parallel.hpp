#pragma once

#include <cstddef>
#include <functional>

namespace hoferlab {

// Number of worker threads: HOFERLAB_THREADS if set (>=1), otherwise
// hardware concurrency.
int worker_count();

// Runs fn(i) for i in [0, n). Work items must be independent; results should
// be written to pre-sized slots so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace hoferlab
