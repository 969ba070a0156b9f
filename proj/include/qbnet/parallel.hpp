#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace qbnet {

/// Worker count from QBNET_THREADS (0 or unset = hardware concurrency).
inline unsigned worker_count() {
    unsigned requested = 0;
    if (const char* env = std::getenv("QBNET_THREADS")) {
        try {
            requested = static_cast<unsigned>(std::max(0L, std::stol(env)));
        } catch (...) {
            requested = 0;
        }
    }
    if (requested == 0) {
        requested = std::max(1u, std::thread::hardware_concurrency());
    }
    return requested;
}

/// Calls fn(i) for every i in [0, count). Each index is handled exactly once;
/// callers write results into per-index slots so output order never depends
/// on scheduling. The first exception thrown by any call is rethrown.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(worker_count(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            }
        });
    }
    pool.clear();
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}  // namespace qbnet
