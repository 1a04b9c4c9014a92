#include <cmath>
#include <numbers>

#include "kfwer/simd/kernels.hpp"

namespace kfwer::simd {
namespace {

inline double sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

void normal_sf_scalar(const double* x, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = sf(x[i]);
}

void shifted_normal_sf_scalar(double shift, double slope, double inv_scale, const double* y, double* out,
                              std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = sf((shift - slope * y[i]) * inv_scale);
}

void multiply_inplace_scalar(double* acc, const double* v, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] *= v[i];
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void factor_combine_scalar(double common, const double* load, const double* resid, const double* z,
                           const double* mu, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = load[i] * common + resid[i] * z[i] + mu[i];
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{
        Isa::scalar,           normal_sf_scalar, shifted_normal_sf_scalar, multiply_inplace_scalar,
        dot_scalar,            factor_combine_scalar,
    };
    return table;
}

}  // namespace kfwer::simd
