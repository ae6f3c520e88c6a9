#pragma once

#include <omp.h>

#include <cstddef>
#include <cstdint>
#include <exception>
#include <vector>

namespace eklab {

// Resolve the effective thread count: the smaller of the EKLAB_THREADS cap
// (0 = uncapped) and the OpenMP maximum.
int effective_threads(int cap = 0);

// Reads EKLAB_THREADS from the environment once; 0 when unset or unparsable.
int env_thread_cap();

// Deterministic parallel map-reduce: [0, n) is cut into fixed chunks, each
// chunk produces a partial of type T, and partials are folded strictly in
// chunk order.  The result is independent of the thread count, which is what
// makes byte-identical exports possible under any EKLAB_THREADS.
//
// ChunkFn: T(std::uint64_t begin, std::uint64_t end)
// FoldFn:  void(T& acc, T&& part)
template <typename T, typename ChunkFn, typename FoldFn>
T chunked_reduce(std::uint64_t n, std::uint64_t chunk, T init, ChunkFn&& per_chunk, FoldFn&& fold,
                 int thread_cap = 0) {
    if (n == 0) return init;
    if (chunk == 0) chunk = 1;
    const std::uint64_t nchunks = (n + chunk - 1) / chunk;
    std::vector<T> parts(nchunks, init);
    std::exception_ptr err;

    const int threads = effective_threads(thread_cap);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(nchunks); ++c) {
        try {
            const std::uint64_t b = static_cast<std::uint64_t>(c) * chunk;
            const std::uint64_t e = b + chunk < n ? b + chunk : n;
            parts[static_cast<std::size_t>(c)] = per_chunk(b, e);
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);

    T acc = init;
    for (auto& p : parts) fold(acc, std::move(p));
    return acc;
}

// Deterministic parallel fill of out[i] for i in [0, n): writes are disjoint,
// so the result never depends on scheduling.  Exceptions are collected and
// rethrown after the region joins (OpenMP regions must not leak throws).
template <typename Fn>
void parallel_fill(std::uint64_t n, Fn&& fn, int thread_cap = 0) {
    std::exception_ptr err;
    const int threads = effective_threads(thread_cap);
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        try {
            fn(static_cast<std::uint64_t>(i));
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
}

// Neumaier-compensated serial sum; used wherever floating accumulations feed
// exported numbers, so the result is a pure function of the input order.
double compensated_sum(const std::vector<double>& v);

} // namespace eklab
