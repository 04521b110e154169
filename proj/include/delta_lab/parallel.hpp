#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace delta_lab {

inline unsigned default_workers() {
    if (const char* e = std::getenv("DELTA_LAB_WORKERS")) {
        int v = std::atoi(e);
        if (v > 0) return unsigned(v);
    }
    unsigned h = std::thread::hardware_concurrency();
    return h ? h : 1;
}

// Runs fn(i) for i in [0, n). Callers write into slot i, so the merged
// result does not depend on scheduling.
template <class Fn>
void parallel_for(size_t n, unsigned workers, Fn&& fn) {
    if (workers <= 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    auto body = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lk(mu);
                if (!err) err = std::current_exception();
                next = n;
            }
        }
    };
    std::vector<std::thread> ts;
    unsigned w = std::min<size_t>(workers, n);
    for (unsigned k = 0; k < w; ++k) ts.emplace_back(body);
    for (auto& t : ts) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace delta_lab
