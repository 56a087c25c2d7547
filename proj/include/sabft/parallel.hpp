#pragma once

#include <cstddef>
#include <functional>

namespace sabft {

// Worker count: REALM_SIM_THREADS if set to a positive integer, else the
// hardware concurrency.
std::size_t worker_count();

// Calls body(i) for i in [0, n) across worker_count() threads. Each index
// runs exactly once; callers write results into per-index slots so the
// outcome does not depend on scheduling. The first exception thrown by any
// body is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace sabft
