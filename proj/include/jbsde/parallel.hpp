#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <utility>
#include <vector>

namespace jbsde {

inline int resolve_workers(int hint)
{
    if (hint > 0) return hint;
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

// Runs body(begin, end, block_index) over a fixed block partition of [0, n).
// The partition depends only on (n, workers), never on scheduling, so any
// computation that writes disjoint per-index results is reproducible across
// worker counts as long as each block keeps its internal order.
// The first exception in block order is rethrown after all blocks finish.
template <class Body>
void parallel_for_blocks(std::size_t n, int workers, Body&& body)
{
    std::size_t w = static_cast<std::size_t>(resolve_workers(workers));
    w = std::max<std::size_t>(1, std::min(w, n));
    if (w <= 1) {
        body(std::size_t{0}, n, std::size_t{0});
        return;
    }
    std::vector<std::exception_ptr> errors(w);
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (std::size_t k = 0; k < w; ++k) {
        std::size_t begin = n * k / w;
        std::size_t end = n * (k + 1) / w;
        pool.emplace_back([&, begin, end, k] {
            try {
                body(begin, end, k);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace jbsde
