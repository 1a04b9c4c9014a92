// AVX2 + FMA variants. This translation unit is compiled with -mavx2 -mfma and
// must only be entered after the CPUID check in dispatch.cpp.

#include <immintrin.h>

#include <cmath>
#include <numbers>

#include "kfwer/simd/kernels.hpp"

namespace kfwer::simd {
namespace {

// Cody's rational Chebyshev approximations for erf/erfc (netlib specfun CALERF).
constexpr double kA[5] = {3.1611237438705656, 113.864154151050156, 377.485237685302021, 3209.37758913846947,
                          .185777706184603153};
constexpr double kB[4] = {23.6012909523441209, 244.024637934444173, 1282.61652607737228, 2844.23683343917062};
constexpr double kC[9] = {.564188496988670089, 8.88314979438837594, 66.1191906371416295,
                          298.635138197400131, 881.95222124176909,  1712.04761263407058,
                          2051.07837782607147, 1230.33935479799725, 2.15311535474403846e-8};
constexpr double kD[8] = {15.7449261107098347, 117.693950891312499, 537.181101862009858, 1621.38957456669019,
                          3290.79923573345963, 4362.61909014324716, 3439.36767414372164, 1230.33935480374942};
constexpr double kP[6] = {.305326634961232344, .360344899949804439, .125781726111229246,
                          .0160837851487422766, 6.58749161529837803e-4, .0163153871373020978};
constexpr double kQ[5] = {2.56852019228982242, 1.87295284992346047, .527905102951428412, .0605183413124413191,
                          .00233520497626869185};
constexpr double kSqrtPiInv = 0.56418958354775628695;
constexpr double kThresh = 0.46875;
constexpr double kXBig = 26.543;

inline __m256d set1(double v) { return _mm256_set1_pd(v); }

// exp(a) for a in [-708, 709]; Cephes Pade form with two-constant ln2 reduction.
inline __m256d exp_pd(__m256d a) {
    const __m256d lo = set1(-708.0);
    const __m256d hi = set1(709.0);
    const __m256d underflow = _mm256_cmp_pd(a, lo, _CMP_LT_OQ);
    a = _mm256_max_pd(_mm256_min_pd(a, hi), lo);

    const __m256d n = _mm256_round_pd(_mm256_mul_pd(a, set1(1.4426950408889634073599)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, set1(6.93145751953125E-1), a);
    r = _mm256_fnmadd_pd(n, set1(1.42860682030941723212E-6), r);

    const __m256d xx = _mm256_mul_pd(r, r);
    __m256d px = _mm256_fmadd_pd(set1(1.26177193074810590878E-4), xx, set1(3.02994407707441961300E-2));
    px = _mm256_fmadd_pd(px, xx, set1(9.99999999999999999910E-1));
    px = _mm256_mul_pd(px, r);
    __m256d qx = _mm256_fmadd_pd(set1(3.00198505138664455042E-6), xx, set1(2.52448340349684104192E-3));
    qx = _mm256_fmadd_pd(qx, xx, set1(2.27265548208155028766E-1));
    qx = _mm256_fmadd_pd(qx, xx, set1(2.00000000000000000009E0));
    __m256d e = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
    e = _mm256_fmadd_pd(set1(2.0), e, set1(1.0));

    // 2^n via the exponent field: n sits in the low mantissa bits of n + 1.5*2^52.
    const __m256d magic = set1(6755399441055744.0);
    const __m256i nbits = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(n, magic)), _mm256_castpd_si256(magic));
    const __m256i pow2 = _mm256_slli_epi64(_mm256_add_epi64(nbits, _mm256_set1_epi64x(1023)), 52);
    e = _mm256_mul_pd(e, _mm256_castsi256_pd(pow2));
    return _mm256_andnot_pd(underflow, e);
}

// erfc(z) for any finite z.
inline __m256d erfc_pd(__m256d z) {
    const __m256d sign_mask = set1(-0.0);
    const __m256d y = _mm256_andnot_pd(sign_mask, z);
    const __m256d negative = _mm256_cmp_pd(z, _mm256_setzero_pd(), _CMP_LT_OQ);

    // |z| <= 0.46875: erfc = 1 - z P(z^2)/Q(z^2)
    const __m256d ysq_small = _mm256_mul_pd(y, y);
    __m256d num = _mm256_mul_pd(set1(kA[4]), ysq_small);
    __m256d den = ysq_small;
    for (int i = 0; i < 3; ++i) {
        num = _mm256_mul_pd(_mm256_add_pd(num, set1(kA[i])), ysq_small);
        den = _mm256_mul_pd(_mm256_add_pd(den, set1(kB[i])), ysq_small);
    }
    const __m256d erf_small =
        _mm256_div_pd(_mm256_mul_pd(z, _mm256_add_pd(num, set1(kA[3]))), _mm256_add_pd(den, set1(kB[3])));
    const __m256d small = _mm256_sub_pd(set1(1.0), erf_small);

    // Shared exp(-y^2) factor, split as exp(-ysq^2) exp(-del) with ysq = trunc(16y)/16.
    const __m256d ytr = _mm256_mul_pd(_mm256_round_pd(_mm256_mul_pd(y, set1(16.0)), _MM_FROUND_TO_ZERO | _MM_FROUND_NO_EXC),
                                      set1(1.0 / 16.0));
    const __m256d del = _mm256_mul_pd(_mm256_sub_pd(y, ytr), _mm256_add_pd(y, ytr));
    const __m256d gauss = _mm256_mul_pd(exp_pd(_mm256_sub_pd(_mm256_setzero_pd(), _mm256_mul_pd(ytr, ytr))),
                                        exp_pd(_mm256_sub_pd(_mm256_setzero_pd(), del)));

    // 0.46875 < |z| <= 4
    num = _mm256_mul_pd(set1(kC[8]), y);
    den = y;
    for (int i = 0; i < 7; ++i) {
        num = _mm256_mul_pd(_mm256_add_pd(num, set1(kC[i])), y);
        den = _mm256_mul_pd(_mm256_add_pd(den, set1(kD[i])), y);
    }
    const __m256d mid = _mm256_mul_pd(gauss, _mm256_div_pd(_mm256_add_pd(num, set1(kC[7])), _mm256_add_pd(den, set1(kD[7]))));

    // |z| > 4
    const __m256d inv = _mm256_div_pd(set1(1.0), _mm256_mul_pd(y, y));
    num = _mm256_mul_pd(set1(kP[5]), inv);
    den = inv;
    for (int i = 0; i < 4; ++i) {
        num = _mm256_mul_pd(_mm256_add_pd(num, set1(kP[i])), inv);
        den = _mm256_mul_pd(_mm256_add_pd(den, set1(kQ[i])), inv);
    }
    __m256d large = _mm256_div_pd(_mm256_mul_pd(inv, _mm256_add_pd(num, set1(kP[4]))), _mm256_add_pd(den, set1(kQ[4])));
    large = _mm256_div_pd(_mm256_sub_pd(set1(kSqrtPiInv), large), y);
    large = _mm256_mul_pd(gauss, large);
    large = _mm256_andnot_pd(_mm256_cmp_pd(y, set1(kXBig), _CMP_GE_OQ), large);

    __m256d upper = _mm256_blendv_pd(mid, large, _mm256_cmp_pd(y, set1(4.0), _CMP_GT_OQ));
    // Reflect only the tail branches: erfc(-y) = 2 - erfc(y).
    upper = _mm256_blendv_pd(upper, _mm256_sub_pd(set1(2.0), upper), negative);
    return _mm256_blendv_pd(upper, small, _mm256_cmp_pd(y, set1(kThresh), _CMP_LE_OQ));
}

inline __m256d sf_pd(__m256d x) {
    return _mm256_mul_pd(set1(0.5), erfc_pd(_mm256_div_pd(x, set1(std::numbers::sqrt2))));
}

inline double sf_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

void normal_sf_avx2(const double* x, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, sf_pd(_mm256_loadu_pd(x + i)));
    for (; i < n; ++i) out[i] = sf_tail(x[i]);
}

void shifted_normal_sf_avx2(double shift, double slope, double inv_scale, const double* y, double* out,
                            std::size_t n) {
    const __m256d vs = set1(shift);
    const __m256d vl = set1(slope);
    const __m256d vi = set1(inv_scale);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d arg = _mm256_mul_pd(_mm256_fnmadd_pd(vl, _mm256_loadu_pd(y + i), vs), vi);
        _mm256_storeu_pd(out + i, sf_pd(arg));
    }
    for (; i < n; ++i) out[i] = sf_tail((shift - slope * y[i]) * inv_scale);
}

void multiply_inplace_avx2(double* acc, const double* v, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(acc + i, _mm256_mul_pd(_mm256_loadu_pd(acc + i), _mm256_loadu_pd(v + i)));
    }
    for (; i < n; ++i) acc[i] *= v[i];
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d s0 = _mm256_setzero_pd();
    __m256d s1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
        s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
    }
    for (; i + 4 <= n; i += 4) s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, _mm256_add_pd(s0, s1));
    double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void factor_combine_avx2(double common, const double* load, const double* resid, const double* z,
                         const double* mu, double* out, std::size_t n) {
    const __m256d c = set1(common);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_fmadd_pd(_mm256_loadu_pd(load + i), c, _mm256_loadu_pd(mu + i));
        v = _mm256_fmadd_pd(_mm256_loadu_pd(resid + i), _mm256_loadu_pd(z + i), v);
        _mm256_storeu_pd(out + i, v);
    }
    for (; i < n; ++i) out[i] = load[i] * common + resid[i] * z[i] + mu[i];
}

}  // namespace

const KernelTable& avx2_kernel_table() {
    static const KernelTable table{
        Isa::avx2,      normal_sf_avx2, shifted_normal_sf_avx2, multiply_inplace_avx2,
        dot_avx2,       factor_combine_avx2,
    };
    return table;
}

}  // namespace kfwer::simd
