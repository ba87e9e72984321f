#pragma once

#include <cstddef>
#include <functional>

namespace bufchem {

/// Number of worker threads: 1 when NO_PARALLEL=1 is set, otherwise the
/// hardware concurrency.
unsigned worker_count();

/// Runs body(i) for i in [0, n) across worker_count() threads. Each index is
/// processed exactly once; the first exception thrown is rethrown here.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace bufchem
