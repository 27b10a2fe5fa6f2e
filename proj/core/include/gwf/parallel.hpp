#pragma once

#include <cstddef>
#include <functional>

namespace gwf {

// Worker count: GWF_LAB_THREADS if set to a positive integer, otherwise the
// hardware concurrency. Never influences results.
std::size_t worker_count();

// Calls body(i) for every i in [0, n). Callers write into pre-sized slots
// indexed by i and reduce afterwards in index order. If any call throws, the
// exception from the smallest failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace gwf
