// AVX2 kernel variants. Each function carries a target attribute instead of
// the whole file being compiled with -mavx2, so this translation unit can be
// linked into a generic binary; dispatch happens at runtime in kernels.cpp.
//
// Multiplies and adds stay separate (no FMA): together with -ffp-contract=off
// on the scalar path this keeps AVX2 results bit-identical to the reference.

#include "feedmine/kernels.hpp"

#include <immintrin.h>

namespace feedmine::kernels {
namespace {

__attribute__((target("avx2"))) void weighted_sum_avx2(const double *const *cols,
                                                       std::size_t ncols, const double *weights,
                                                       std::size_t n, double *out) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t k = 0; k < ncols; ++k) {
            const __m256d w = _mm256_set1_pd(weights[k]);
            const __m256d c = _mm256_loadu_pd(cols[k] + i);
            acc = _mm256_add_pd(acc, _mm256_mul_pd(w, c));
        }
        _mm256_storeu_pd(out + i, acc);
    }
    for (; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < ncols; ++k)
            acc = acc + weights[k] * cols[k][i];
        out[i] = acc;
    }
}

__attribute__((target("avx2"))) void add_avx2(const double *a, const double *b, std::size_t n,
                                              double *out) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i)
        out[i] = a[i] + b[i];
}

__attribute__((target("avx2"))) MinMax minmax_avx2(const double *v, std::size_t n) {
    // min/max are order-independent on NaN-free input, so lane-wise reduction
    // matches the scalar scan exactly.
    MinMax mm{v[0], v[0]};
    std::size_t i = 0;
    if (n >= 4) {
        __m256d vmin = _mm256_loadu_pd(v);
        __m256d vmax = vmin;
        for (i = 4; i + 4 <= n; i += 4) {
            const __m256d x = _mm256_loadu_pd(v + i);
            vmin = _mm256_min_pd(vmin, x);
            vmax = _mm256_max_pd(vmax, x);
        }
        alignas(32) double lanes[4];
        _mm256_store_pd(lanes, vmin);
        mm.min = lanes[0];
        for (int l = 1; l < 4; ++l)
            if (lanes[l] < mm.min) mm.min = lanes[l];
        _mm256_store_pd(lanes, vmax);
        mm.max = lanes[0];
        for (int l = 1; l < 4; ++l)
            if (lanes[l] > mm.max) mm.max = lanes[l];
    }
    for (; i < n; ++i) {
        if (v[i] < mm.min) mm.min = v[i];
        if (v[i] > mm.max) mm.max = v[i];
    }
    return mm;
}

__attribute__((target("avx2"))) void scale_to_unit_avx2(const double *v, std::size_t n, double lo,
                                                        double hi, double *out) {
    const double range = hi - lo;
    const __m256d vlo = _mm256_set1_pd(lo);
    const __m256d vrange = _mm256_set1_pd(range);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_loadu_pd(v + i);
        _mm256_storeu_pd(out + i, _mm256_div_pd(_mm256_sub_pd(x, vlo), vrange));
    }
    for (; i < n; ++i)
        out[i] = (v[i] - lo) / range;
}

} // namespace

namespace detail {
const Ops avx2_ops{weighted_sum_avx2, add_avx2, minmax_avx2, scale_to_unit_avx2};
} // namespace detail

} // namespace feedmine::kernels
