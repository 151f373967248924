#include "feedmine/kernels.hpp"

#include <atomic>
#include <cassert>
#include <cstdlib>

namespace feedmine::kernels {

namespace {

void weighted_sum_scalar(const double *const *cols, std::size_t ncols, const double *weights,
                         std::size_t n, double *out) {
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < ncols; ++k)
            acc = acc + weights[k] * cols[k][i];
        out[i] = acc;
    }
}

void add_scalar(const double *a, const double *b, std::size_t n, double *out) {
    for (std::size_t i = 0; i < n; ++i)
        out[i] = a[i] + b[i];
}

MinMax minmax_scalar(const double *v, std::size_t n) {
    MinMax mm{v[0], v[0]};
    for (std::size_t i = 1; i < n; ++i) {
        if (v[i] < mm.min) mm.min = v[i];
        if (v[i] > mm.max) mm.max = v[i];
    }
    return mm;
}

void scale_to_unit_scalar(const double *v, std::size_t n, double lo, double hi, double *out) {
    const double range = hi - lo;
    for (std::size_t i = 0; i < n; ++i)
        out[i] = (v[i] - lo) / range;
}

std::atomic<bool> g_force_scalar{false};

bool env_disables_avx2() {
    const char *flag = std::getenv("FEEDMINE_NO_AVX2");
    return flag != nullptr && flag[0] != '\0' && flag[0] != '0';
}

} // namespace

namespace detail {

const Ops scalar_ops{weighted_sum_scalar, add_scalar, minmax_scalar, scale_to_unit_scalar};

const Ops &active() {
    static const bool cpu_ok = avx2_available() && !env_disables_avx2();
    if (!cpu_ok || g_force_scalar.load(std::memory_order_relaxed))
        return scalar_ops;
    return avx2_ops;
}

} // namespace detail

bool avx2_available() {
    return __builtin_cpu_supports("avx2") != 0;
}

bool avx2_enabled() {
    return &detail::active() == &detail::avx2_ops;
}

void set_force_scalar(bool force) {
    g_force_scalar.store(force, std::memory_order_relaxed);
}

void weighted_sum(std::span<const double *const> cols, std::span<const double> weights,
                  std::span<double> out) {
    assert(cols.size() == weights.size());
    detail::active().weighted_sum(cols.data(), cols.size(), weights.data(), out.size(),
                                  out.data());
}

void add(std::span<const double> a, std::span<const double> b, std::span<double> out) {
    assert(a.size() == b.size() && a.size() == out.size());
    detail::active().add(a.data(), b.data(), a.size(), out.data());
}

MinMax minmax(std::span<const double> v) {
    assert(!v.empty());
    return detail::active().minmax(v.data(), v.size());
}

void scale_to_unit(std::span<const double> v, double lo, double hi, std::span<double> out) {
    assert(v.size() == out.size());
    detail::active().scale_to_unit(v.data(), v.size(), lo, hi, out.data());
}

} // namespace feedmine::kernels
