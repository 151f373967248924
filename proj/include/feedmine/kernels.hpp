#pragma once

// Arithmetic inner loops used by feature normalization and the weight-grid
// sweep. Every kernel has a scalar reference implementation and an AVX2
// variant selected at runtime; the AVX2 code vectorizes across elements and
// keeps each element's operation order identical to the scalar path, so the
// two variants produce equal results (tests assert exact equality).

#include <cstddef>
#include <span>

namespace feedmine::kernels {

/// True when the CPU supports AVX2.
bool avx2_available();

/// True when AVX2 variants are currently dispatched.
bool avx2_enabled();

/// Forces the scalar reference path (tests, FEEDMINE_NO_AVX2=1, --no-simd).
/// Call before spinning up worker threads.
void set_force_scalar(bool force);

struct MinMax {
    double min;
    double max;
};

/// out[i] = sum_k weights[k] * cols[k][i], accumulated in k order.
void weighted_sum(std::span<const double *const> cols, std::span<const double> weights,
                  std::span<double> out);

/// out[i] = a[i] + b[i].
void add(std::span<const double> a, std::span<const double> b, std::span<double> out);

/// Min and max of a non-empty, NaN-free range.
MinMax minmax(std::span<const double> v);

/// out[i] = (v[i] - lo) / (hi - lo). Caller guarantees hi > lo.
void scale_to_unit(std::span<const double> v, double lo, double hi, std::span<double> out);

namespace detail {
struct Ops {
    void (*weighted_sum)(const double *const *cols, std::size_t ncols, const double *weights,
                         std::size_t n, double *out);
    void (*add)(const double *a, const double *b, std::size_t n, double *out);
    MinMax (*minmax)(const double *v, std::size_t n);
    void (*scale_to_unit)(const double *v, std::size_t n, double lo, double hi, double *out);
};
extern const Ops scalar_ops;
extern const Ops avx2_ops;
const Ops &active();
} // namespace detail

} // namespace feedmine::kernels
