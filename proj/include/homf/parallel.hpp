#pragma once

#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace homf {

/// Runs fn(lo, hi) over contiguous slabs of [begin, end) on `workers`
/// threads. The per-index work this library distributes is independent and
/// writes disjoint outputs, so the partition never affects results.
/// workers <= 1 runs inline. The first exception thrown by a worker is
/// rethrown on the calling thread.
template <typename Fn>
void parallel_chunks(std::size_t begin, std::size_t end, std::size_t workers, Fn&& fn) {
    const std::size_t count = end > begin ? end - begin : 0;
    if (count == 0) return;
    if (workers > count) workers = count;
    if (workers <= 1) {
        fn(begin, end);
        return;
    }

    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);

    const std::size_t base = count / workers;
    const std::size_t extra = count % workers;
    std::size_t lo = begin;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t hi = lo + base + (w < extra ? 1 : 0);
        pool.emplace_back([&, lo, hi] {
            try {
                fn(lo, hi);
            } catch (...) {
                std::lock_guard<std::mutex> guard(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
        lo = hi;
    }
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

/// Worker-count resolution: an explicit config value wins, then the
/// HOMF_WORKERS environment variable, then hardware concurrency.
inline std::size_t resolve_workers(std::size_t configured) {
    if (configured > 0) return configured;
    if (const char* env = std::getenv("HOMF_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

}  // namespace homf
