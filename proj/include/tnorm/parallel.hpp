#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string_view>
#include <thread>
#include <vector>

namespace tnorm {

/// Worker count: hardware concurrency, capped by TNORM_THREADS when set to a positive integer.
inline std::size_t worker_count() {
    std::size_t n = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("TNORM_THREADS")) {
        std::string_view s(env);
        std::size_t cap = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), cap);
        if (ec == std::errc() && p == s.data() + s.size() && cap > 0) n = std::min(n, cap);
    }
    return n;
}

/// Calls fn(i) for i in [0, n), distributing indices over worker threads in
/// chunks. fn must only write state owned by index i. The first exception
/// thrown by any worker is rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, std::size_t chunk = 1) {
    if (n == 0) return;
    chunk = std::max<std::size_t>(1, chunk);
    const std::size_t workers = std::min(worker_count(), (n + chunk - 1) / chunk);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        try {
            for (;;) {
                const std::size_t begin = next.fetch_add(chunk, std::memory_order_relaxed);
                if (begin >= n) break;
                const std::size_t end = std::min(n, begin + chunk);
                for (std::size_t i = begin; i < end; ++i) fn(i);
            }
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next.store(n, std::memory_order_relaxed);
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(body);
    body();
    pool.clear();
    if (error) std::rethrow_exception(error);
}

}  // namespace tnorm
