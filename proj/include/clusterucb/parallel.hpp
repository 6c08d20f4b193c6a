#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace cucb {

inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// Runs chunk_fn over contiguous [begin, end) slices of [0, n). Results that
// are written per-index stay deterministic regardless of the thread count.
inline void parallel_for(std::size_t n, unsigned threads,
                         const std::function<void(std::size_t, std::size_t)>& chunk_fn) {
    if (n == 0) return;
    const unsigned workers =
        std::max<unsigned>(1, std::min<std::size_t>(resolve_threads(threads), n));
    if (workers == 1) {
        chunk_fn(0, n);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        if (begin >= n) break;
        const std::size_t end = std::min(n, begin + chunk);
        pool.emplace_back(chunk_fn, begin, end);
    }
    chunk_fn(0, std::min(n, chunk));
    for (auto& t : pool) t.join();
}

}  // namespace cucb
