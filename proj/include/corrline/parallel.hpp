#pragma once

// Trial-parallel execution with deterministic, order-preserving delivery.
//
// Trials are processed in fixed-size chunks. Worker threads grab chunks from
// an atomic counter, but finished chunks are handed to the sink strictly in
// chunk order, so any reduction the sink performs sees trials in the same
// order no matter how many workers ran. A bounded reorder window keeps
// memory independent of the trial count.

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

#include "corrline/rng.hpp"

namespace corrline::par {

inline constexpr std::uint64_t kChunkSize = 1024;

// fn:   (trial_index, Stream&) -> Record
// sink: (chunk_index, const std::vector<Record>&), called in chunk order
template <typename Record, typename Fn, typename Sink>
void run_trials(std::uint64_t n_trials, unsigned parallelism, std::uint64_t seed, Fn fn,
                Sink sink, std::uint64_t chunk_size = kChunkSize) {
    if (n_trials == 0) return;
    if (chunk_size == 0) chunk_size = kChunkSize;
    const std::uint64_t n_chunks = (n_trials + chunk_size - 1) / chunk_size;

    auto run_chunk = [&](std::uint64_t c) {
        const std::uint64_t lo = c * chunk_size;
        const std::uint64_t hi = std::min(n_trials, lo + chunk_size);
        std::vector<Record> records;
        records.reserve(hi - lo);
        for (std::uint64_t i = lo; i < hi; ++i) {
            rng::Stream stream = rng::derive_stream(seed, i);
            records.push_back(fn(i, stream));
        }
        return records;
    };

    if (parallelism <= 1 || n_chunks == 1) {
        for (std::uint64_t c = 0; c < n_chunks; ++c) {
            const std::vector<Record> records = run_chunk(c);
            sink(c, records);
        }
        return;
    }

    std::atomic<std::uint64_t> next_chunk{0};
    std::mutex mu;
    std::condition_variable cv;
    std::map<std::uint64_t, std::vector<Record>> parked;
    std::uint64_t expected = 0;
    std::exception_ptr failure;
    const std::uint64_t window = 2 * static_cast<std::uint64_t>(parallelism) + 2;

    auto worker = [&]() {
        for (;;) {
            const std::uint64_t c = next_chunk.fetch_add(1);
            if (c >= n_chunks) return;
            std::vector<Record> records;
            try {
                records = run_chunk(c);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!failure) failure = std::current_exception();
                cv.notify_all();
                return;
            }
            std::unique_lock<std::mutex> lock(mu);
            cv.wait(lock, [&] { return failure || c < expected + window; });
            if (failure) return;
            parked.emplace(c, std::move(records));
            // Flush every chunk that is now ready, in order. The sink runs
            // under the lock; reductions are cheap relative to trial work.
            while (!parked.empty() && parked.begin()->first == expected) {
                auto node = parked.extract(parked.begin());
                try {
                    sink(node.key(), node.mapped());
                } catch (...) {
                    if (!failure) failure = std::current_exception();
                    cv.notify_all();
                    return;
                }
                ++expected;
            }
            cv.notify_all();
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(parallelism);
    for (unsigned w = 0; w < parallelism; ++w) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace corrline::par
