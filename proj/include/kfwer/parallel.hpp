#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace kfwer {

// Worker count: KFWER_THREADS if set to a positive integer, else hardware concurrency.
inline int worker_count() {
    if (const char* env = std::getenv("KFWER_THREADS")) {
        try {
            const int v = std::stoi(env);
            if (v > 0) return v;
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// Calls body(chunk_index, begin, end) for each chunk of [0, total). Chunks are
// claimed round-robin by worker; results must not depend on which worker ran a chunk.
template <class Body>
void parallel_chunks(std::int64_t total, std::int64_t chunk, Body&& body, int workers = worker_count()) {
    if (total <= 0) return;
    const std::int64_t chunks = (total + chunk - 1) / chunk;
    workers = static_cast<int>(std::min<std::int64_t>(workers, chunks));
    auto run = [&](int w) {
        for (std::int64_t c = w; c < chunks; c += workers) {
            const std::int64_t begin = c * chunk;
            body(c, begin, std::min(total, begin + chunk));
        }
    };
    if (workers <= 1) {
        run(0);
        return;
    }
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            try {
                run(w);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace kfwer
