#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sqhhg {

inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

/**
 * Runs fn(i) for i in [0, n_tasks) on up to @p workers threads. Tasks are
 * handed out in ascending order; callers write into pre-sized slots so the
 * result never depends on scheduling. The exception of the lowest failing
 * index is rethrown after all workers have stopped.
 */
template <typename Fn>
void parallel_for(std::size_t n_tasks, unsigned workers, Fn&& fn) {
    if (n_tasks == 0) return;
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::size_t>(n_tasks, 1024))));
    if (workers == 1) {
        for (std::size_t i = 0; i < n_tasks; ++i) fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::size_t error_index = n_tasks;
    std::exception_ptr error;

    auto worker = [&] {
        for (;;) {
            if (failed.load(std::memory_order_relaxed)) return;
            const std::size_t i = next.fetch_add(1);
            if (i >= n_tasks) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (i < error_index) {
                    error_index = i;
                    error = std::current_exception();
                }
                failed.store(true, std::memory_order_relaxed);
            }
        }
    };

    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    pool.clear();
    if (error) std::rethrow_exception(error);
}

} // namespace sqhhg
