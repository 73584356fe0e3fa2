#pragma once

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ga {

// OpenMP-backed parallel loop over [0, count). Falls back to a serial loop
// when OpenMP is unavailable or threads <= 1. Body must be safe to run
// concurrently for distinct indices.
template <typename F>
void parallel_for(int64_t count, int threads, F&& body) {
#ifdef _OPENMP
    if (threads != 1 && count > 1) {
#pragma omp parallel for schedule(static) num_threads(threads > 0 ? threads : omp_get_max_threads())
        for (int64_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
#else
    (void)threads;
#endif
    for (int64_t i = 0; i < count; ++i) {
        body(i);
    }
}

// Same, but with dynamic scheduling for uneven per-item cost (LLM calls).
template <typename F>
void parallel_for_dynamic(int64_t count, int threads, F&& body) {
#ifdef _OPENMP
    if (threads != 1 && count > 1) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads > 0 ? threads : omp_get_max_threads())
        for (int64_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
#else
    (void)threads;
#endif
    for (int64_t i = 0; i < count; ++i) {
        body(i);
    }
}

} // namespace ga
