#include "trajsplit/worker_pool.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <utility>

namespace trajsplit {

WorkerPool::WorkerPool(std::size_t threads) {
    threads = std::max<std::size_t>(threads, 1);
    workers_.reserve(threads);
    for (std::size_t i = 0; i < threads; ++i) workers_.emplace_back([this] { work(); });
}

WorkerPool::~WorkerPool() {
    {
        std::lock_guard lock(mutex_);
        stop_ = true;
    }
    wake_.notify_all();
    for (auto& t : workers_) t.join();
}

std::size_t WorkerPool::default_threads() {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("TRAJSPLIT_THREADS")) {
        try {
            const long cap = std::stol(env);
            if (cap > 0) n = std::min(n, static_cast<std::size_t>(cap));
        } catch (const std::exception&) {
        }
    }
    return n;
}

void WorkerPool::drain() {
    // Called with mutex_ held; runs tasks of the current generation.
    while (next_ < count_) {
        const std::size_t i = next_++;
        mutex_.unlock();
        std::exception_ptr err;
        try {
            (*body_)(i);
        } catch (...) {
            err = std::current_exception();
        }
        mutex_.lock();
        if (err && !error_) error_ = err;
        if (++finished_ == count_) done_.notify_all();
    }
}

void WorkerPool::work() {
    std::unique_lock lock(mutex_);
    std::size_t seen = generation_;
    while (true) {
        wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
        if (stop_) return;
        seen = generation_;
        drain();
    }
}

void WorkerPool::parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    if (count == 0) return;
    std::unique_lock lock(mutex_);
    body_ = &body;
    count_ = count;
    next_ = 0;
    finished_ = 0;
    error_ = nullptr;
    ++generation_;
    wake_.notify_all();
    drain();
    done_.wait(lock, [&] { return finished_ == count_; });
    body_ = nullptr;
    count_ = 0;
    if (error_) std::rethrow_exception(std::exchange(error_, nullptr));
}

}  // namespace trajsplit
