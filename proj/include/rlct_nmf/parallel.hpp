#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rlct_nmf {

/// Worker count from RLCT_NMF_WORKERS, else 1.
int default_workers();

/// Calls fn(i) for i in [0, count) on up to `workers` threads. Units are
/// claimed dynamically, so callers must make each unit's result independent
/// of which thread runs it. The first exception thrown by any unit is
/// rethrown after all threads join.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
    const std::size_t threads =
        std::min<std::size_t>(count, static_cast<std::size_t>(
                                         std::max(1, workers)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count)
                return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                next.store(count);
                return;
            }
        }
    };

    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back(body);
    pool.clear();
    if (error)
        std::rethrow_exception(error);
}

} // namespace rlct_nmf
