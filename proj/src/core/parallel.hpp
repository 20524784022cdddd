#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace sgsde {

// Static chunked parallel loop. Workers write to disjoint, preallocated
// slots; reductions happen afterwards in a fixed order, so results do not
// depend on the thread count.
inline void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& fn) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    if (threads == 1 || n < 2) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const int workers = static_cast<int>(std::min<std::int64_t>(threads, n));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            const std::int64_t lo = n * w / workers;
            const std::int64_t hi = n * (w + 1) / workers;
            for (std::int64_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

// Pairwise tree sum over rows [lo, hi) of a row accessor; associativity is
// fixed by the recursion, independent of evaluation order.
template <typename Get, typename Value>
Value pairwise_sum(std::int64_t lo, std::int64_t hi, const Get& get, const Value& zero) {
    if (lo >= hi) return zero;
    if (hi - lo == 1) return get(lo);
    const std::int64_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(lo, mid, get, zero) + pairwise_sum(mid, hi, get, zero);
}

}  // namespace sgsde
