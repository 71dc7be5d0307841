#ifndef JCSIM_PARALLEL_HPP
#define JCSIM_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace jcsim {

/// Runs fn(i) for i in [0, count) on `workers` threads pulling indices from a
/// shared counter. Results must be written to per-index slots so the output
/// does not depend on the number of workers. The first exception thrown by
/// any task is rethrown after all threads have joined.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn &&fn)
{
    const std::size_t nthreads = std::min<std::size_t>(std::max(1, workers), count);
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto body = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count)
                return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error)
                    first_error = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(nthreads);
        for (std::size_t t = 0; t < nthreads; ++t)
            pool.emplace_back(body);
    }
    if (first_error)
        std::rethrow_exception(first_error);
}

} // namespace jcsim

#endif // JCSIM_PARALLEL_HPP
