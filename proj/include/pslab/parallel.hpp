#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pslab {

/// Worker count from PSPEC_WORKERS, falling back to hardware concurrency.
int default_workers();

/// Runs body(i) for i in [0, count) on up to `workers` threads, striding
/// indices. Callers write results into per-index slots, so the outcome does
/// not depend on the worker count. The first exception is rethrown.
template <class Body>
void parallel_for(std::size_t count, int workers, Body&& body) {
    const std::size_t n_threads =
        std::max<std::size_t>(1, std::min<std::size_t>(count, workers < 1 ? 1 : workers));
    if (n_threads == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) {
        threads.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < count; i += n_threads) body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& th : threads) th.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace pslab
