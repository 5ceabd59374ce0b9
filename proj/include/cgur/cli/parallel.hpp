#ifndef CGUR_CLI_PARALLEL_HPP
#define CGUR_CLI_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace cgur::cli
{

/// Worker count: CG_UNCERT_THREADS if set to a positive integer, else the
/// hardware concurrency.
inline unsigned thread_count()
{
    if (const char* env = std::getenv("CG_UNCERT_THREADS"))
    {
        try
        {
            const long n = std::stol(env);
            if (n > 0)
                return static_cast<unsigned>(n);
        }
        catch (const std::exception&)
        {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// out[i] = f(i) for i < n, computed on a pool of threads. Results keep
/// input order; the first exception thrown by any task is rethrown.
template <typename R, typename F>
std::vector<R> parallel_map(std::size_t n, F&& f, unsigned threads = thread_count())
{
    std::vector<R> out(n);
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            out[i] = f(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++)
        {
            try
            {
                out[i] = f(i);
            }
            catch (...)
            {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next = n;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back(worker);
    for (auto& th : pool)
        th.join();
    if (failure)
        std::rethrow_exception(failure);
    return out;
}

} // namespace cgur::cli

#endif // CGUR_CLI_PARALLEL_HPP
