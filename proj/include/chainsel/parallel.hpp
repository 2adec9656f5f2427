#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace chainsel {

// Runs fn(i) for i in [0, n) across `threads` workers in contiguous chunks.
// fn must write only to per-index slots; the partition then has no effect on
// the result.
template <class Fn>
void parallel_for(long long n, int threads, Fn&& fn) {
    if (threads <= 1 || n < 2) {
        for (long long i = 0; i < n; ++i) fn(i);
        return;
    }
    long long workers = std::min<long long>(threads, n);
    long long chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (long long w = 0; w < workers; ++w) {
        long long lo = w * chunk;
        long long hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (long long i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

// Chunked variant for workers that keep local scratch state:
// fn(worker, lo, hi). Worker count is returned so callers can size
// per-worker accumulators beforehand via plan_workers.
inline int plan_workers(long long n, int threads) {
    if (threads <= 1 || n < 2) return 1;
    return static_cast<int>(std::min<long long>(threads, n));
}

template <class Fn>
void parallel_chunks(long long n, int threads, Fn&& fn) {
    int workers = plan_workers(n, threads);
    if (workers == 1) {
        fn(0, 0, n);
        return;
    }
    long long chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        long long lo = w * chunk;
        long long hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([w, lo, hi, &fn] { fn(w, lo, hi); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace chainsel
