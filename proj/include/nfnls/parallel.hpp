#pragma once

#include <cstddef>
#include <functional>

namespace nfnls {

/// Worker cap: NFNLS_THREADS if set and positive, else hardware concurrency.
int worker_count();

/// Runs body(i) for i in [0, count) on up to worker_count() threads. Each
/// index is processed exactly once; callers write to disjoint slots so the
/// result does not depend on scheduling. The first exception is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace nfnls
