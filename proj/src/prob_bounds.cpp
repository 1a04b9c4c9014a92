#include "kfwer/prob_bounds.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "kfwer/parallel.hpp"

namespace kfwer {

namespace {

constexpr std::int64_t kChunk = 4096;

void check_reps(long reps, long minimum = 10'000) {
    if (reps < minimum) throw ConfigError("Monte Carlo estimate needs reps >= " + std::to_string(minimum));
}

void check_sampler(const PValueSampler& sampler, const CriticalVector& cv) {
    if (sampler.n() != cv.n) throw ConfigError("sampler dimension differs from n of the critical vector");
}

// Mean and SE from per-chunk sums, reduced in chunk order so the result does
// not depend on the worker count.
ProbEstimate reduce(const std::vector<double>& sums, const std::vector<double>& squares, long reps) {
    double s = 0.0;
    double q = 0.0;
    for (std::size_t i = 0; i < sums.size(); ++i) {
        s += sums[i];
        q += squares[i];
    }
    const double mean = s / reps;
    const double var = std::max(0.0, (q - reps * mean * mean) / (reps - 1.0));
    return {mean, std::sqrt(var / reps), reps, EstimateMethod::monte_carlo};
}

}  // namespace

CriticalVector::CriticalVector(int n_, int k_, std::vector<double> c_) : n(n_), k(k_), c(std::move(c_)) {
    if (k < 1 || n < k) throw ConfigError("critical vector needs 1 <= k <= n");
    if (static_cast<int>(c.size()) != n - k + 1) throw ConfigError("critical vector needs n - k + 1 constants");
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (std::isnan(c[i])) throw ConfigError("critical constant is NaN");
        if (i > 0 && c[i] < c[i - 1]) throw ConfigError("critical constants must be nondecreasing");
    }
}

ProbEstimate union_prob_mc(const PValueSampler& sampler, const CriticalVector& cv, long reps, std::uint64_t seed) {
    check_reps(reps);
    check_sampler(sampler, cv);
    const int n = cv.n;
    const int k = cv.k;
    std::vector<long> hits((reps + kChunk - 1) / kChunk, 0);
    parallel_chunks(reps, kChunk, [&](std::int64_t chunk, std::int64_t begin, std::int64_t end) {
        std::vector<double> p(n);
        long h = 0;
        for (std::int64_t r = begin; r < end; ++r) {
            sampler.draw(seed, static_cast<std::uint64_t>(r), {}, p);
            std::sort(p.begin(), p.end());
            for (int i = k; i <= n; ++i) {
                if (p[i - 1] <= cv.at(i)) {
                    ++h;
                    break;
                }
            }
        }
        hits[chunk] = h;
    });
    long total = 0;
    for (long h : hits) total += h;
    const double est = static_cast<double>(total) / reps;
    return {est, std::sqrt(est * (1.0 - est) / reps), reps, EstimateMethod::monte_carlo};
}

ProbEstimate lemma21_rhs_mc(const PValueSampler& sampler, const CriticalVector& cv, long reps, std::uint64_t seed) {
    if (cv.n > 8) throw ScaleError("subset-sum estimate is limited to n <= 8");
    check_reps(reps, 100'000);
    check_sampler(sampler, cv);
    const int n = cv.n;
    const int k = cv.k;

    std::vector<unsigned> subsets;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (std::popcount(mask) == k) subsets.push_back(mask);
    }
    std::vector<double> inv_a(n + 1, 0.0);
    for (int i = k; i <= n; ++i) inv_a[i] = 1.0 / num::binomial(i, k);

    const std::size_t chunks = (reps + kChunk - 1) / kChunk;
    std::vector<double> sums(chunks, 0.0);
    std::vector<double> squares(chunks, 0.0);
    parallel_chunks(reps, kChunk, [&](std::int64_t chunk, std::int64_t begin, std::int64_t end) {
        std::vector<double> p(n);
        std::vector<double> rest;
        std::vector<char> ok(n - k + 2);
        double s = 0.0;
        double q = 0.0;
        for (std::int64_t r = begin; r < end; ++r) {
            sampler.draw(seed, static_cast<std::uint64_t>(r), {}, p);
            double total = 0.0;
            for (unsigned mask : subsets) {
                double xk = 0.0;  // X_{k:J}
                rest.clear();
                for (int i = 0; i < n; ++i) {
                    if (mask >> i & 1u) xk = std::max(xk, p[i]);
                    else rest.push_back(p[i]);
                }
                std::sort(rest.begin(), rest.end());
                // ok[m]: Y_j > c_{j+k} for every j >= m (1-based over the complement).
                const int m_count = n - k;
                ok[m_count + 1] = 1;
                for (int m = m_count; m >= 1; --m) ok[m] = ok[m + 1] && rest[m - 1] > cv.at(m + k);

                double term = xk <= cv.at(n) ? inv_a[n] : 0.0;
                for (int i = k; i < n; ++i) {
                    if (!ok[i - k + 1]) continue;
                    if (xk <= cv.at(i)) term += inv_a[i];
                    if (xk <= cv.at(i + 1)) term -= inv_a[i + 1];
                }
                total += term;
            }
            s += total;
            q += total * total;
        }
        sums[chunk] = s;
        squares[chunk] = q;
    });
    return reduce(sums, squares, reps);
}

namespace {

using Legendre = boost::math::quadrature::gauss<double, 8>;

// Integral over lo < u_i < ... < u_n < 1 of the indicators u_j > lower[j].
// Each nested integral is split at the constants so every piece is polynomial.
double ordered_tail(const std::vector<double>& lower, const std::vector<double>& breaks, int i, double lo) {
    const int n = static_cast<int>(lower.size()) - 1;
    if (i > n) return 1.0;
    const double a = std::max(lo, lower[i]);
    if (a >= 1.0) return 0.0;
    double total = 0.0;
    double left = a;
    auto piece = [&](double right) {
        if (right > left) {
            total += Legendre::integrate([&](double u) { return ordered_tail(lower, breaks, i + 1, u); }, left, right);
            left = right;
        }
    };
    for (double b : breaks) {
        if (b > left && b < 1.0) piece(b);
    }
    piece(1.0);
    return total;
}

}  // namespace

ProbEstimate union_prob_exact_smalln(const CriticalVector& cv) {
    if (cv.n > 4) throw ScaleError("exact union probability is limited to n <= 4");
    const int n = cv.n;
    std::vector<double> lower(n + 1, 0.0);
    std::vector<double> breaks;
    for (int i = cv.k; i <= n; ++i) {
        lower[i] = std::clamp(cv.at(i), 0.0, 1.0);
        breaks.push_back(lower[i]);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    double factorial = 1.0;
    for (int j = 2; j <= n; ++j) factorial *= j;
    const double none = factorial * ordered_tail(lower, breaks, 1, 0.0);
    return {std::clamp(1.0 - none, 0.0, 1.0), 0.0, 0, EstimateMethod::exact_quadrature};
}

double bound_eq22(const std::function<double(double)>& Fk, const CriticalVector& cv) {
    double acc = Fk(cv.at(cv.k));
    for (int i = cv.k + 1; i <= cv.n; ++i) acc += (Fk(cv.at(i)) - Fk(cv.at(i - 1))) / num::binomial(i, cv.k);
    return num::binomial(cv.n, cv.k) * acc;
}

double bonferroni_eq23(double gk_at_ck, int n, int k) {
    if (k < 1 || n < k) throw ConfigError("bonferroni bound needs 1 <= k <= n");
    return std::min(1.0, num::binomial(n, k) * gk_at_ck);
}

}  // namespace kfwer
