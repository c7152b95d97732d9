#pragma once

#include <cstddef>
#include <functional>

namespace roadnet {

// Worker count: ROADNET_THREADS when set to a positive integer, otherwise
// std::thread::hardware_concurrency(), at least 1.
int thread_count();

// Runs fn(i) for every i in [0, n) across up to thread_count() threads.
// Callers keep results deterministic by writing only to slot i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace roadnet
