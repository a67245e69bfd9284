#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace omega {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

// Runs fn(task_index, worker_index) for task_index in [0, n_tasks).
// Workers pull indices from a shared counter, so the assignment of tasks to
// workers is nondeterministic -- callers must write results into
// task-indexed slots and reduce in index order to stay deterministic.
// The first exception thrown by any task is rethrown after all workers join.
inline void parallel_for(std::size_t n_tasks, int threads,
                         const std::function<void(std::size_t, int)>& fn) {
    threads = resolve_threads(threads);
    if (threads <= 1 || n_tasks <= 1) {
        for (std::size_t i = 0; i < n_tasks; ++i) fn(i, 0);
        return;
    }
    if (static_cast<std::size_t>(threads) > n_tasks)
        threads = static_cast<int>(n_tasks);

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&](int worker_index) {
        for (;;) {
            std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n_tasks || failed.load(std::memory_order_relaxed)) break;
            try {
                fn(i, worker_index);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
                break;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker, w);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace omega
