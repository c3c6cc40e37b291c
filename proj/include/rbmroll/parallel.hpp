#ifndef RBMROLL_PARALLEL_HPP
#define RBMROLL_PARALLEL_HPP

#include <cstddef>
#include <thread>
#include <vector>

namespace rbmroll {

/// Runs fn(begin, end) over a partition of [0, count) on `threads` threads.
/// Item-level results must not depend on the partition; callers keep
/// determinism by writing to disjoint slots and reducing serially afterwards.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
    if (count == 0) return;
    if (threads <= 1 || count == 1) {
        fn(std::size_t(0), count);
        return;
    }
    const std::size_t workers = std::min(threads, count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (std::thread& t : pool) t.join();
}

}  // namespace rbmroll

#endif  // RBMROLL_PARALLEL_HPP
