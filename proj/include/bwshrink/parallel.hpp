#ifndef BWSHRINK_PARALLEL_HPP
#define BWSHRINK_PARALLEL_HPP

#include <cstddef>
#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bwshrink {

// Worker count from BWSHRINK_WORKERS; defaults to 1.
unsigned worker_count();

namespace detail {
// Set on threads spawned by parallel_for; nested loops then run serially.
inline thread_local bool in_parallel_region = false;
} // namespace detail

// Runs fn(i) for i in [0, count) on `workers` threads with a static
// interleaved partition. fn must write only to slots owned by index i; the
// first exception thrown by any task is rethrown on the caller.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn)
{
    if (workers <= 1 || count <= 1 || detail::in_parallel_region) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    const std::size_t nthreads = std::min<std::size_t>(workers, count);
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    threads.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) {
        threads.emplace_back([&, t] {
            detail::in_parallel_region = true;
            try {
                for (std::size_t i = t; i < count; i += nthreads)
                    fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
            }
        });
    }
    for (auto& th : threads)
        th.join();
    if (error)
        std::rethrow_exception(error);
}

} // namespace bwshrink

#endif // BWSHRINK_PARALLEL_HPP
