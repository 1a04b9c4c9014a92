#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kfwer/errors.hpp"
#include "kfwer/simd/kernels.hpp"

namespace kfwer::simd {

#if defined(KFWER_HAVE_AVX2)
const KernelTable& avx2_kernel_table();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(KFWER_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable& select_table() {
    const char* forced = std::getenv("KFWER_SIMD");
    if (forced != nullptr && std::string(forced) == "scalar") return scalar_kernels();
    if (const KernelTable* avx = avx2_kernels()) return *avx;
    return scalar_kernels();
}

void check_sizes(std::size_t a, std::size_t b) {
    if (a != b) throw ConfigError("kernel span length mismatch");
}

}  // namespace

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
    }
    return "unknown";
}

const KernelTable* avx2_kernels() {
#if defined(KFWER_HAVE_AVX2)
    static const bool available = cpu_has_avx2();
    if (available) return &avx2_kernel_table();
#endif
    return nullptr;
}

const KernelTable& active_kernels() {
    static const KernelTable& table = select_table();
    return table;
}

void normal_sf(std::span<const double> x, std::span<double> out) {
    check_sizes(x.size(), out.size());
    active_kernels().normal_sf(x.data(), out.data(), x.size());
}

void shifted_normal_sf(double shift, double slope, double inv_scale, std::span<const double> y,
                       std::span<double> out) {
    check_sizes(y.size(), out.size());
    active_kernels().shifted_normal_sf(shift, slope, inv_scale, y.data(), out.data(), y.size());
}

void multiply_inplace(std::span<double> acc, std::span<const double> v) {
    check_sizes(acc.size(), v.size());
    active_kernels().multiply_inplace(acc.data(), v.data(), acc.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
    check_sizes(a.size(), b.size());
    return active_kernels().dot(a.data(), b.data(), a.size());
}

void factor_combine(double common, std::span<const double> load, std::span<const double> resid,
                    std::span<const double> z, std::span<const double> mu, std::span<double> out) {
    check_sizes(load.size(), out.size());
    check_sizes(resid.size(), out.size());
    check_sizes(z.size(), out.size());
    check_sizes(mu.size(), out.size());
    active_kernels().factor_combine(common, load.data(), resid.data(), z.data(), mu.data(), out.data(),
                                    out.size());
}

}  // namespace kfwer::simd
