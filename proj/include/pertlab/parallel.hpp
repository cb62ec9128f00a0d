#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace pertlab {

inline int default_threads() {
    if (const char* env = std::getenv("PERTLAB_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Runs fn(i) for i in [begin, end) across `threads` workers.  Callers index
/// results by i, so the outcome is independent of scheduling.
inline void parallel_for(int begin, int end, int threads, const std::function<void(int)>& fn) {
    const int count = end - begin;
    if (count <= 0) return;
    if (threads <= 1 || count == 1) {
        for (int i = begin; i < end; ++i) fn(i);
        return;
    }
    std::atomic<int> next{begin};
    std::exception_ptr error;
    std::mutex err_mtx;
    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= end) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mtx);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int nw = std::min(threads, count);
    pool.reserve(nw);
    for (int t = 0; t < nw; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace pertlab
