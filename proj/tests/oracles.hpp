#pragma once

// Reference computations that share no code with the library: a long-double
// erf series, plain bisection, direct binomial sums and a std::random sampler.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

// Phi(x) from the Maclaurin series of erf, in long double. Good to ~1e-16 for |x| <= 4.
inline long double normal_cdf(long double x) {
    const long double z = x / std::sqrt(2.0L);
    long double term = z;
    long double sum = z;
    for (int n = 1; n < 200; ++n) {
        term *= -z * z / n;
        const long double add = term / (2 * n + 1);
        sum += add;
        if (std::fabs(add) < 1e-22L) break;
    }
    const long double two_over_sqrt_pi = 1.1283791670955125738961589031215452L;
    return 0.5L + 0.5L * two_over_sqrt_pi * sum;
}

// Bisection on an increasing g; 200 halvings.
inline double bisect(const std::function<double(double)>& g, double lo, double hi) {
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) < 0.0) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

inline long double choose(int n, int k) {
    long double r = 1.0L;
    for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
    return r;
}

// sum_{j=j0}^{m} C(m,j) u^j (1-u)^(m-j), term by term.
inline long double binomial_tail(int m, int j0, long double u) {
    long double s = 0.0L;
    for (int j = j0; j <= m; ++j) s += choose(m, j) * std::pow(u, j) * std::pow(1.0L - u, m - j);
    return s;
}

// Right-tailed p-values of X_i = load_i * Y + sqrt(1 - load_i^2) * Z_i.
class FactorSampler {
public:
    FactorSampler(std::vector<double> load, unsigned long long seed) : load_(std::move(load)), rng_(seed) {}

    void draw(std::vector<double>& p) {
        const double y = normal_(rng_);
        p.resize(load_.size());
        for (std::size_t i = 0; i < load_.size(); ++i) {
            const double x = load_[i] * y + std::sqrt(1.0 - load_[i] * load_[i]) * normal_(rng_);
            p[i] = 0.5 * std::erfc(x / std::sqrt(2.0));
        }
    }

private:
    std::vector<double> load_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_;
};

}  // namespace oracle
