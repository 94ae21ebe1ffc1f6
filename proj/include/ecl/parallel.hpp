#pragma once

#include <cstddef>
#include <functional>

namespace ecl {

// Runs fn(i) for i in [0, count) on up to ECL_THREADS workers (hardware
// concurrency by default). Each index is processed exactly once; results
// must be written to per-index slots so output stays deterministic.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

std::size_t worker_count();

}  // namespace ecl
