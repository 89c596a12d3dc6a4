#pragma once

#include <cstddef>
#include <functional>

namespace qhyper {

/// Worker count: QHYPER_THREADS if set and positive, else hardware concurrency.
unsigned worker_count();

/// Runs body(i) for i in [0, count) on up to worker_count() threads. Each index
/// runs exactly once; callers write results into per-index slots so that the
/// outcome does not depend on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace qhyper
