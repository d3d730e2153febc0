#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hag::detail {

/// Runs fn(task, worker) for task = 0..tasks-1 on up to `threads` workers.
/// Tasks are handed out dynamically; callers keep per-worker state and
/// combine it with an order-independent reduction.
template <class Fn>
void parallel_for(std::size_t tasks, int threads, Fn&& fn) {
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    if (workers == 1 || tasks < 2) {
        for (std::size_t t = 0; t < tasks; ++t) fn(t, std::size_t{0});
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&](std::size_t worker) {
        try {
            for (std::size_t t = next.fetch_add(1); t < tasks; t = next.fetch_add(1)) fn(t, worker);
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(body, w);
    body(0);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace hag::detail
