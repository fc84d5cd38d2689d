#pragma once

#include <functional>

#include "hisparse/model.hpp"

namespace hisparse {

/// Worker threads to use: hardware concurrency, capped by HISPARSE_THREADS.
unsigned worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. Each index
/// runs exactly once; the first exception thrown by any body is rethrown.
void parallel_for(Index n, const std::function<void(Index)>& body);

}  // namespace hisparse
