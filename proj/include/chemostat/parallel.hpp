#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace chemostat {

// Index-parallel map over [0, n). Each worker owns a contiguous chunk and
// writes results by index, so merging is order-independent and the output
// is identical to the serial run. The first exception (lowest index) wins,
// matching what a serial loop would have thrown.
template <typename Body>
void parallel_for(std::size_t n, const Body& body) {
    const std::size_t hw = std::thread::hardware_concurrency();
    const std::size_t workers = hw > 1 && n >= 64 ? std::min<std::size_t>(hw, 8) : 1;
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }

    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::size_t> error_index(workers, n);
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            const std::size_t lo = w * chunk;
            const std::size_t hi = std::min(n, lo + chunk);
            for (std::size_t i = lo; i < hi; ++i) {
                try {
                    body(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                    error_index[w] = i;
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();

    std::size_t first = n;
    std::exception_ptr what;
    for (std::size_t w = 0; w < workers; ++w) {
        if (errors[w] && error_index[w] < first) {
            first = error_index[w];
            what = errors[w];
        }
    }
    if (what) std::rethrow_exception(what);
}

}  // namespace chemostat
