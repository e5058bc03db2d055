#pragma once

#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace psvm {

// Reductions are accumulated per fixed-size chunk and the chunk partials are
// combined in index order, so results do not depend on the thread count or
// schedule. Changing kReduceChunk changes the rounding, so it is part of the
// numeric contract.
inline constexpr std::size_t kReduceChunk = 2048;

// Work below this many items is not worth a parallel region.
inline constexpr std::size_t kParallelCutoff = 4096;

inline std::size_t chunk_count(std::size_t n) {
    return (n + kReduceChunk - 1) / kReduceChunk;
}

// f(i) for i in [0,n); iterations must be independent.
template <typename F>
void parallel_for(std::size_t n, F&& f) {
#ifdef _OPENMP
    if (n >= 64) {
        #pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            f(static_cast<std::size_t>(i));
        return;
    }
#endif
    for (std::size_t i = 0; i < n; ++i) f(i);
}

// Deterministic sum of term(i) over [0,n).
template <typename Term>
double chunked_sum(std::size_t n, Term&& term) {
    const std::size_t nc = chunk_count(n);
    std::vector<double> partial(nc, 0.0);
#ifdef _OPENMP
    #pragma omp parallel for schedule(static) if (n >= kParallelCutoff)
#endif
    for (long long c = 0; c < static_cast<long long>(nc); ++c) {
        const std::size_t lo = static_cast<std::size_t>(c) * kReduceChunk;
        const std::size_t hi = lo + kReduceChunk < n ? lo + kReduceChunk : n;
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        partial[static_cast<std::size_t>(c)] = s;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

// Deterministic accumulation of a dim-sized vector plus `extra` trailing
// scalars. body(i, acc) adds sample i's contribution into acc (length
// dim + extra). Partials combine in chunk order.
template <typename Body>
std::vector<double> chunked_accumulate(std::size_t n, std::size_t dim, std::size_t extra,
                                       Body&& body) {
    const std::size_t nc = chunk_count(n);
    const std::size_t width = dim + extra;
    std::vector<double> partial(nc * width, 0.0);
#ifdef _OPENMP
    #pragma omp parallel for schedule(static) if (n >= kParallelCutoff)
#endif
    for (long long c = 0; c < static_cast<long long>(nc); ++c) {
        const std::size_t lo = static_cast<std::size_t>(c) * kReduceChunk;
        const std::size_t hi = lo + kReduceChunk < n ? lo + kReduceChunk : n;
        double* acc = partial.data() + static_cast<std::size_t>(c) * width;
        for (std::size_t i = lo; i < hi; ++i) body(i, acc);
    }
    std::vector<double> total(width, 0.0);
    for (std::size_t c = 0; c < nc; ++c) {
        const double* acc = partial.data() + c * width;
        for (std::size_t k = 0; k < width; ++k) total[k] += acc[k];
    }
    return total;
}

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace psvm
