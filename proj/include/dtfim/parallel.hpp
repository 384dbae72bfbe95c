#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace dtfim {

/// Runs body(i) for i in [0, n) across a small worker pool. Work items must
/// be independent; results land in caller-owned slots indexed by i, so output
/// order never depends on scheduling. Serial when the machine has one core or
/// the range is small.
inline void parallel_for(long n, const std::function<void(long)>& body) {
    const unsigned hw = std::thread::hardware_concurrency();
    if (hw <= 1 || n < 16) {
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
    const unsigned workers = std::min<unsigned>(hw, static_cast<unsigned>((n + 15) / 16));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (long i = w; i < n; i += workers) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace dtfim
