#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference version and,
// on x86-64 with AVX2+FMA, a vector version. The active table is chosen once
// at runtime from CPUID; KFWER_SIMD=scalar|avx2 overrides the choice.

#include <cstddef>
#include <span>
#include <string_view>

namespace kfwer::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

struct KernelTable {
    Isa isa;

    // out[i] = 1 - Phi(x[i])
    void (*normal_sf)(const double* x, double* out, std::size_t n);

    // out[i] = 1 - Phi((shift - slope * y[i]) * inv_scale)
    void (*shifted_normal_sf)(double shift, double slope, double inv_scale, const double* y, double* out,
                              std::size_t n);

    // acc[i] *= v[i]
    void (*multiply_inplace)(double* acc, const double* v, std::size_t n);

    // sum a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);

    // out[i] = load[i] * common + resid[i] * z[i] + mu[i]
    void (*factor_combine)(double common, const double* load, const double* resid, const double* z,
                           const double* mu, double* out, std::size_t n);
};

const KernelTable& scalar_kernels();

// nullptr when the build or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

// Table selected at first use.
const KernelTable& active_kernels();

// Span wrappers over the active table. Output spans must match input length.
void normal_sf(std::span<const double> x, std::span<double> out);
void shifted_normal_sf(double shift, double slope, double inv_scale, std::span<const double> y,
                       std::span<double> out);
void multiply_inplace(std::span<double> acc, std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);
void factor_combine(double common, std::span<const double> load, std::span<const double> resid,
                    std::span<const double> z, std::span<const double> mu, std::span<double> out);

}  // namespace kfwer::simd
