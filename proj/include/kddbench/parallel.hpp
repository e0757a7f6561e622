#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace kdd {

inline unsigned effective_parallelism(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// Runs fn(0..n-1) across `degree` workers. Tasks must write only to their own
// slots; results are then independent of the degree.
template <typename Fn>
void parallel_for(std::size_t n, unsigned degree, Fn&& fn) {
    degree = effective_parallelism(degree);
    if (degree <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n) return;
            fn(i);
        }
    };
    std::vector<std::thread> threads;
    const unsigned spawned = static_cast<unsigned>(std::min<std::size_t>(degree, n));
    threads.reserve(spawned);
    for (unsigned t = 1; t < spawned; ++t) threads.emplace_back(worker);
    worker();
    for (auto& th : threads) th.join();
}

}  // namespace kdd
