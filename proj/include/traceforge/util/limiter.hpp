#pragma once

#include <condition_variable>
#include <mutex>

namespace traceforge {

// Global bound on in-flight remote requests, shared by every backend.
class RequestLimiter {
public:
    explicit RequestLimiter(int max_in_flight) : available_(max_in_flight) {}

    void acquire() {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [this] { return available_ > 0; });
        --available_;
    }

    void release() {
        {
            std::lock_guard lock(mutex_);
            ++available_;
        }
        cv_.notify_one();
    }

    class Guard {
    public:
        explicit Guard(RequestLimiter* limiter) : limiter_(limiter) {
            if (limiter_) limiter_->acquire();
        }
        ~Guard() {
            if (limiter_) limiter_->release();
        }
        Guard(const Guard&) = delete;
        Guard& operator=(const Guard&) = delete;

    private:
        RequestLimiter* limiter_;
    };

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    int available_;
};

}  // namespace traceforge
