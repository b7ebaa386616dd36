#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace chang {

namespace detail {
inline std::atomic<int>& sweep_thread_slot() {
    static std::atomic<int> n{1};
    return n;
}
}  // namespace detail

/// Number of worker threads used by verification sweeps and witness
/// scans. Results are bit-identical for every setting: each index is
/// computed independently into its own slot and reductions run
/// sequentially afterwards.
inline int sweep_threads() { return detail::sweep_thread_slot().load(); }

inline void set_sweep_threads(int n) {
    detail::sweep_thread_slot().store(n < 1 ? 1 : n);
}

/// Apply `fn(i)` for i in [0, count). fn must only touch state owned by
/// index i. Work is handed out in fixed blocks via an atomic cursor, so
/// the assignment of blocks to threads does not affect the output.
template <class Fn>
void parallel_for_index(std::size_t count, Fn&& fn) {
    int threads = sweep_threads();
    if (threads <= 1 || count < 128) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    constexpr std::size_t kBlock = 64;
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        for (;;) {
            std::size_t begin = cursor.fetch_add(kBlock);
            if (begin >= count) return;
            std::size_t end = begin + kBlock < count ? begin + kBlock : count;
            for (std::size_t i = begin; i < end; ++i) fn(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace chang
