#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace semeq {

// Runs body(i) for i in [0, count) across up to `workers` threads with a
// static block partition. Each index writes only to its own preallocated
// slot in the caller, so results are identical for any worker count; only
// wall-clock time changes. Exceptions are captured and rethrown (first one
// by index order) on the calling thread.
template <typename Body>
void parallel_for(std::size_t count, unsigned workers, Body&& body) {
    if (count == 0) return;
    const std::size_t n_threads =
        workers <= 1 ? 1 : std::min<std::size_t>(workers, count);
    if (n_threads == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(count);
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    const std::size_t chunk = (count + n_threads - 1) / n_threads;
    for (std::size_t t = 0; t < n_threads; ++t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, begin, end] {
            for (std::size_t i = begin; i < end; ++i) {
                try {
                    body(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
}

}  // namespace semeq
