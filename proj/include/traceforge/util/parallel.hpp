#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace traceforge {

// Runs body(i) for i in [0, count) across up to `workers` threads.
// Indices are claimed from a shared counter, so per-index work stays
// whole. The first exception wins; remaining threads finish their
// current index and stop claiming new ones.
inline void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body) {
    if (count == 0) return;
    if (workers <= 1 || count == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (!failed.load()) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) break;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true);
            }
        }
    };
    std::vector<std::thread> pool;
    std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
    pool.reserve(n);
    for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace traceforge
