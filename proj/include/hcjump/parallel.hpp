#pragma once

#include <cstdlib>
#include <thread>
#include <vector>

namespace hcj {

// Static chunked parallel loop.  Each index writes only its own slot, so
// results are identical for any worker count.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    if (threads <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const unsigned nt = std::min<unsigned>(threads, static_cast<unsigned>(count));
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (unsigned t = 0; t < nt; ++t) {
        pool.emplace_back([&, t]() {
            const std::size_t lo = count * t / nt;
            const std::size_t hi = count * (t + 1) / nt;
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

inline unsigned default_thread_count() {
    if (const char* env = std::getenv("HCJUMP_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    return 1;
}

} // namespace hcj
