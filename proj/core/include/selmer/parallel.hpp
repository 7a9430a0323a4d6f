#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace selmer {

/// Worker count from SELMER_WORKERS, else hardware concurrency (at least 1).
inline unsigned default_workers() {
    if (const char* env = std::getenv("SELMER_WORKERS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

/// Splits [0, n) into fixed chunks of `grain` items, maps each chunk with
/// `map(begin, end) -> Partial` on up to `workers` threads, then folds the
/// partials in chunk order with `reduce(acc, partial)`. Chunk boundaries do
/// not depend on `workers`, so the result is the same for any thread count.
template <class Partial, class Map, class Reduce>
Partial chunked_map_reduce(std::uint64_t n, std::uint64_t grain, unsigned workers, Partial init, Map&& map,
                           Reduce&& reduce) {
    if (grain == 0) grain = 1;
    if (workers == 0) workers = default_workers();
    const std::uint64_t chunks = (n + grain - 1) / grain;
    std::vector<Partial> parts(chunks);

    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto work = [&] {
        for (;;) {
            const std::uint64_t c = next.fetch_add(1);
            if (c >= chunks) return;
            try {
                const std::uint64_t b = c * grain;
                parts[c] = map(b, std::min(n, b + grain));
            } catch (...) {
                std::lock_guard lk(failure_mu);
                if (!failure) failure = std::current_exception();
                next.store(chunks);
            }
        }
    };

    const unsigned threads = static_cast<unsigned>(std::min<std::uint64_t>(workers, chunks));
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    for (auto& p : parts) reduce(init, std::move(p));
    return init;
}

}  // namespace selmer
