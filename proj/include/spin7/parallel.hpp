#pragma once

#include <cstdint>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace spin7::par {

/// Runtime switch between the OpenMP kernels and the serial reference path.
/// Results are identical either way: every kernel writes to disjoint
/// index-addressed slots and reductions are merged in index order.
void setParallel(bool enabled);
bool parallelEnabled();
int threadCount();

/// Index-sliced parallel loop. `fn(i)` must only touch state owned by index i.
template <typename Fn>
void forEach(std::int64_t n, Fn&& fn)
{
#ifdef _OPENMP
    if (parallelEnabled() && n > 1) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
#endif
    for (std::int64_t i = 0; i < n; ++i) fn(i);
}

/// Chunked variant for very large sweeps: fn(begin, end) processes a
/// contiguous range. Chunk boundaries are fixed, not thread-count dependent.
template <typename Fn>
void forEachChunk(std::int64_t n, std::int64_t chunk, Fn&& fn)
{
    const std::int64_t nchunks = (n + chunk - 1) / chunk;
#ifdef _OPENMP
    if (parallelEnabled() && nchunks > 1) {
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t c = 0; c < nchunks; ++c) {
            const std::int64_t b = c * chunk;
            fn(b, b + chunk < n ? b + chunk : n);
        }
        return;
    }
#endif
    for (std::int64_t c = 0; c < nchunks; ++c) {
        const std::int64_t b = c * chunk;
        fn(b, b + chunk < n ? b + chunk : n);
    }
}

} // namespace spin7::par
