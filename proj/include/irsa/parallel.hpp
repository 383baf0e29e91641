#pragma once

#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <thread>
#include <vector>

namespace irsa {

// Runs fn(i) for i in [0, count) on `workers` threads. Work items must be
// independent; callers own any result buffers (typically indexed by i, which
// keeps aggregation order deterministic).
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const auto n_threads = static_cast<std::size_t>(workers) < count
                               ? static_cast<std::size_t>(workers)
                               : count;
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) {
        pool.emplace_back([&]() {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

inline int default_workers() {
    if (const char* env = std::getenv("IRSA_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace irsa
