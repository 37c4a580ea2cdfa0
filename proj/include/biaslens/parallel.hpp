#pragma once

// Deterministic work partitioning. Chunk boundaries depend only on the item
// count, never on the worker count, and each chunk writes to its own output
// slots, so results are byte-identical for any --jobs value.

#include <atomic>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace biaslens {

// Runs fn(begin, end) over fixed-size chunks of [0, n). Workers pull chunk
// indices from a shared counter; chunk layout is independent of `jobs`.
inline void parallel_chunks(std::size_t n, int jobs, std::size_t chunk_size,
                            const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) {
        return;
    }
    if (chunk_size == 0) {
        chunk_size = 1;
    }
    std::size_t n_chunks = (n + chunk_size - 1) / chunk_size;
    if (jobs <= 1 || n_chunks == 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) {
            std::size_t begin = c * chunk_size;
            fn(begin, std::min(begin + chunk_size, n));
        }
        return;
    }

    std::atomic<std::size_t> next_chunk{0};
    std::exception_ptr first_error = nullptr;
    std::mutex error_mutex;

    auto worker = [&]() {
        for (;;) {
            std::size_t c = next_chunk.fetch_add(1);
            if (c >= n_chunks) {
                return;
            }
            std::size_t begin = c * chunk_size;
            try {
                fn(begin, std::min(begin + chunk_size, n));
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) {
                    first_error = std::current_exception();
                }
                return;
            }
        }
    };

    std::vector<std::thread> threads;
    std::size_t n_workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n_chunks);
    threads.reserve(n_workers);
    for (std::size_t i = 0; i < n_workers; ++i) {
        threads.emplace_back(worker);
    }
    for (auto& t : threads) {
        t.join();
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
}

}  // namespace biaslens
