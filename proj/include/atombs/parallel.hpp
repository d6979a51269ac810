#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace atombs {

/// Worker count: ATOMBS_WORKERS if set, otherwise the hardware concurrency.
inline unsigned default_workers() {
    if (const char* env = std::getenv("ATOMBS_WORKERS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return static_cast<unsigned>(n);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Evaluates fn(i) for i in [0, n) on up to `workers` threads. Results keep
/// their index order; the first exception thrown is rethrown.
template <typename Fn>
auto parallel_map(std::size_t n, Fn&& fn, unsigned workers = 0) {
    using R = decltype(fn(std::size_t{}));
    std::vector<R> out(n);
    if (workers == 0) workers = default_workers();
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    out[i] = fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace atombs
