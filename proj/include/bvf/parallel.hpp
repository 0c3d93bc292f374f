#pragma once

#include <cstdlib>
#include <thread>
#include <vector>

namespace bvf {

/// Worker count for node-parallel loops; BVF_THREADS overrides (default 1).
inline int thread_count() {
    static int cached = [] {
        if (const char* env = std::getenv("BVF_THREADS")) {
            int v = std::atoi(env);
            if (v >= 1) return v;
        }
        return 1;
    }();
    return cached;
}

/// Plain block-partitioned parallel loop; the body must be independent per
/// index. Reductions stay out of here so results are order-deterministic.
template <class Body>
void parallel_for(long count, Body&& body) {
    const int workers = thread_count();
    if (workers <= 1 || count < 256) {
        for (long i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    const long chunk = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const long begin = w * chunk;
        const long end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&body, begin, end] {
            for (long i = begin; i < end; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace bvf
