#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

namespace oql {

inline int thread_budget() {
    if (const char* env = std::getenv("ONSETQLAB_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(i) for every i in [0, count) with a static partition over at most
// `threads` workers. Each index must own its output slot: with results keyed
// by index the outcome is the same under any budget, including 1.
template <typename Fn>
inline void parallel_for(std::uint64_t count, Fn&& fn, int threads = thread_budget()) {
    if (count == 0) return;
    std::uint64_t workers = std::min<std::uint64_t>(static_cast<std::uint64_t>(std::max(threads, 1)), count);
    if (workers <= 1) {
        for (std::uint64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (std::uint64_t w = 0; w < workers; ++w) {
        std::uint64_t lo = count * w / workers;
        std::uint64_t hi = count * (w + 1) / workers;
        pool.emplace_back([lo, hi, &fn] {
            for (std::uint64_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace oql
