#include "supertok/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace supertok {

std::size_t worker_count() {
    if (const char* env = std::getenv("SUPERTOKEN_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) return static_cast<std::size_t>(v);
        return 1;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  std::size_t min_parallel) {
    const std::size_t workers = std::min(worker_count(), n);
    if (workers <= 1 || n < min_parallel) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }

    // Fixed-size blocks claimed dynamically; block layout is independent of
    // the worker count, and fn writes only per-index state.
    const std::size_t kBlock = std::max<std::size_t>(1, std::min<std::size_t>(64, n / workers));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t begin = next.fetch_add(kBlock);
                if (begin >= n || failed.load()) return;
                const std::size_t end = std::min(begin + kBlock, n);
                try {
                    for (std::size_t i = begin; i < end; ++i) fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (failed.load()) std::rethrow_exception(error);
}

}  // namespace supertok
