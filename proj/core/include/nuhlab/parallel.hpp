#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nuhlab {

/// Runs fn(i) for i in [0, count) on up to `workers` threads. fn must only write to slot i of
/// its own output, which keeps results independent of scheduling. The first exception thrown
/// (lowest index) is rethrown after all workers finish.
template <class Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
    const std::size_t n_threads = std::min<std::size_t>(std::max(workers, 1), count);
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex guard;
    std::exception_ptr first_error;
    std::size_t first_index = count;
    auto body = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(guard);
                if (i < first_index) {
                    first_index = i;
                    first_error = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace nuhlab
