#pragma once

#include <cstddef>
#include <functional>

namespace supertok {

// Worker cap: SUPERTOKEN_THREADS when set (minimum 1), else the hardware
// concurrency. Re-read on every call so tests can vary it.
std::size_t worker_count();

// Runs fn(i) for i in [0, n). Work is split into fixed-size blocks handed to
// workers; fn must only write state owned by index i, so results never depend
// on the worker count. Runs serially below min_parallel items; pass a small
// value when each item is heavy.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  std::size_t min_parallel = 256);

}  // namespace supertok
