#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace bridgenet::detail {

inline unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// Splits [0, n) into at most `threads` contiguous chunks and calls
// fn(chunk_index, begin, end) for each. Chunk boundaries depend only on n and
// the thread count, so per-chunk results merged in chunk order are reproducible.
// Returns the number of chunks used.
template <typename Fn>
std::size_t parallel_chunks(std::size_t n, unsigned threads, Fn&& fn) {
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(resolve_threads(threads), n));
    if (n == 0) return 0;
    const std::size_t per = (n + workers - 1) / workers;
    const std::size_t chunks = (n + per - 1) / per;
    if (chunks == 1) {
        fn(std::size_t{0}, std::size_t{0}, n);
        return 1;
    }
    std::vector<std::exception_ptr> errors(chunks);
    {
        std::vector<std::jthread> pool;
        pool.reserve(chunks);
        for (std::size_t c = 0; c < chunks; ++c) {
            const std::size_t begin = c * per;
            const std::size_t end = std::min(n, begin + per);
            pool.emplace_back([&, c, begin, end] {
                try {
                    fn(c, begin, end);
                } catch (...) {
                    errors[c] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return chunks;
}

}  // namespace bridgenet::detail
