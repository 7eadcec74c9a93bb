#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace carrier {

inline unsigned default_thread_count() {
    if (const char* env = std::getenv("CARRIER_LAB_THREADS")) {
        long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

/// Runs fn(block_index, begin, end) over [0,n) split into fixed-size blocks.
/// Block boundaries depend only on (n, block_size), so per-block results can
/// be reduced in block order to make aggregation independent of the worker
/// count. Returns the number of blocks.
template <typename Fn>
std::size_t parallel_blocks(std::size_t n, std::size_t block_size, unsigned threads, Fn&& fn) {
    if (block_size == 0) block_size = 1;
    const std::size_t nblocks = (n + block_size - 1) / block_size;
    if (threads <= 1 || nblocks <= 1) {
        for (std::size_t b = 0; b < nblocks; ++b)
            fn(b, b * block_size, std::min(n, (b + 1) * block_size));
        return nblocks;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t b = next.fetch_add(1);
            if (b >= nblocks) return;
            fn(b, b * block_size, std::min(n, (b + 1) * block_size));
        }
    };
    std::vector<std::thread> pool;
    unsigned use = std::min<std::size_t>(threads, nblocks);
    pool.reserve(use);
    for (unsigned t = 0; t < use; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return nblocks;
}

}  // namespace carrier
