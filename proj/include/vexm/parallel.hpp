#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace vexm {

namespace detail {
inline std::atomic<unsigned>& thread_setting() {
    static std::atomic<unsigned> threads{1};
    return threads;
}
}  // namespace detail

/// Worker count used by the concurrent kernels. Defaults to 1.
inline unsigned thread_count() { return detail::thread_setting().load(); }

inline void set_thread_count(unsigned n) { detail::thread_setting().store(std::max(1u, n)); }

/// Runs fn(i) for i in [0, count). Each index is visited exactly once; callers
/// write to disjoint slots so results do not depend on scheduling. The first
/// exception thrown by any worker is rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(thread_count(), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace vexm
