#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace erw {

// Replicate-parallel loop: fn(i) for i in [0, n). Work is pulled from an
// atomic counter, so scheduling is nondeterministic, but every fn(i) must
// derive its randomness from i and write only to slot i; results are then
// independent of the worker count. Reductions over slots happen afterwards,
// in index order.
template <class Fn>
void parallel_for_index(std::int64_t n, int workers, Fn&& fn) {
    if (workers <= 1 || n <= 1) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const int count = static_cast<int>(std::min<std::int64_t>(workers, n));
    pool.reserve(static_cast<std::size_t>(count));
    for (int t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

inline int default_workers() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

} // namespace erw
