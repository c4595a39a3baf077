#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace pabeam {

inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// Splits [begin, end) into contiguous chunks, one per worker. Results must be
// written to disjoint locations; chunking never changes output values.
inline void parallel_for_chunks(std::size_t begin, std::size_t end,
                                const std::function<void(std::size_t, std::size_t)>& body,
                                unsigned n_threads = 0) {
    const std::size_t count = end > begin ? end - begin : 0;
    if (count == 0) return;
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(resolve_threads(n_threads), count));
    if (workers <= 1) {
        body(begin, end);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(workers);
    const std::size_t chunk = (count + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t lo = begin + static_cast<std::size_t>(w) * chunk;
        if (lo >= end) break;
        const std::size_t hi = std::min(end, lo + chunk);
        threads.emplace_back(body, lo, hi);
    }
    for (auto& t : threads) t.join();
}

}  // namespace pabeam
