#include "kfwer/num_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "kfwer/gauss_hermite.hpp"
#include "kfwer/simd/kernels.hpp"

namespace kfwer {

Probability::Probability(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw DomainError("probability outside [0,1]: " + std::to_string(value));
    }
}

void AccuracySpec::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw ConfigError("accuracy tolerances must be positive");
    if (max_refinements < 4 || max_refinements > 10) throw ConfigError("max_refinements must lie in [4, 10]");
}

namespace num {
namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;

// Wichura's AS 241 (PPND16), accurate to about 1e-16 before refinement.
double quantile_as241(double p) {
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r + 6.7265770927008700853e+4) * r +
                    4.5921953931549871457e+4) * r + 1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                 1.3314166789178437745e+2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r + 3.9307895800092710610e+4) * r +
                    2.1213794301586595867e+4) * r + 5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                 4.2313330701600911252e+1) * r + 1.0);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r + 2.41780725177450611770e-1) * r +
                 1.27045825245236838258e0) * r + 3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r + 1.51986665636164571966e-2) * r +
                 1.48103976427480074590e-1) * r + 6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 1.24266094738807843860e-3) * r +
                 2.65321895265761230930e-2) * r + 2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r + 1.84631831751005468180e-5) * r +
                 7.86869131145613259100e-4) * r + 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -x : x;
}

const std::vector<double>& log_factorials() {
    static const std::vector<double> table = [] {
        std::vector<double> t(20001, 0.0);
        for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] + std::log(static_cast<double>(i));
        return t;
    }();
    return table;
}

double log_factorial(int n) {
    const auto& t = log_factorials();
    if (static_cast<std::size_t>(n) < t.size()) return t[n];
    return std::lgamma(n + 1.0);
}

}  // namespace

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) {
    if (!std::isfinite(x)) throw DomainError("normal_cdf: non-finite argument");
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_sf(double x) {
    if (!std::isfinite(x)) throw DomainError("normal_sf: non-finite argument");
    return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0,1)");
    double x = quantile_as241(p);
    // One Halley step against the erfc-based CDF, measured on the smaller tail.
    const double err = p < 0.5 ? normal_cdf(x) - p : (1.0 - p) - normal_sf(x);
    const double u = err * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    if (std::isfinite(u)) x -= u / (1.0 + 0.5 * x * u);
    return x;
}

double normal_isf(double q) { return -normal_quantile(q); }

double integrate_gaussian(const std::function<double(double)>& f, const AccuracySpec& acc) {
    return integrate_gaussian_batch(
        [&f](std::span<const double> nodes, std::span<double> values) {
            for (std::size_t i = 0; i < nodes.size(); ++i) values[i] = f(nodes[i]);
        },
        acc);
}

double integrate_gaussian_batch(const BatchIntegrand& f, const AccuracySpec& acc) {
    acc.validate();
    std::vector<double> values;
    double previous = std::numeric_limits<double>::quiet_NaN();
    for (int level = 0; level <= acc.max_refinements; ++level) {
        const GaussHermiteRule& rule = gauss_hermite_rule(level);
        values.resize(rule.nodes.size());
        f(rule.nodes, values);
        const double estimate = simd::dot(rule.weights, values);
        if (!std::isfinite(estimate)) {
            throw ConvergenceError("integrate_gaussian: non-finite estimate", previous, estimate);
        }
        if (level > 0 && std::abs(estimate - previous) <= std::max(acc.abs_tol, acc.rel_tol * std::abs(estimate))) {
            return estimate;
        }
        if (level == acc.max_refinements) {
            throw ConvergenceError("integrate_gaussian: no convergence after " + std::to_string(level) +
                                       " refinements",
                                   previous, estimate);
        }
        previous = estimate;
    }
    return previous;  // unreachable
}

double find_root(const std::function<double(double)>& g, double lo, double hi, const AccuracySpec& acc) {
    acc.validate();
    if (!(lo <= hi)) throw ConfigError("find_root: empty bracket");
    double flo = g(lo);
    double fhi = g(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (std::isnan(flo) || std::isnan(fhi) || (flo > 0.0) == (fhi > 0.0)) {
        throw BracketError("find_root: no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }

    int retained = 0;  // +1: lo kept last step, -1: hi kept last step (Illinois bookkeeping)
    double width_two_ago = hi - lo;
    double width_one_ago = hi - lo;
    for (int iter = 0; iter < 400; ++iter) {
        const double width = hi - lo;
        if (width <= acc.abs_tol) {
            const double best = std::abs(flo) <= std::abs(fhi) ? lo : hi;
            const double fbest = std::min(std::abs(flo), std::abs(fhi));
            if (fbest <= acc.abs_tol) return best;
        }
        const double mid = lo + 0.5 * width;
        if (mid <= lo || mid >= hi) break;  // bracket cannot shrink further

        double x = lo - flo * width / (fhi - flo);
        const bool slow = iter >= 2 && width > 0.5 * width_two_ago;
        if (slow || !(x > lo && x < hi)) {
            x = mid;
            retained = 0;
        }
        const double fx = g(x);
        if (fx == 0.0) return x;
        if ((fx > 0.0) == (flo > 0.0)) {
            lo = x;
            flo = fx;
            if (retained == -1) fhi *= 0.5;
            retained = -1;
        } else {
            hi = x;
            fhi = fx;
            if (retained == 1) flo *= 0.5;
            retained = 1;
        }
        width_two_ago = width_one_ago;
        width_one_ago = width;
    }
    // Function values halved by the Illinois rule are not true g values; re-evaluate.
    const double glo = g(lo);
    const double ghi = g(hi);
    const double best = std::abs(glo) <= std::abs(ghi) ? lo : hi;
    if (hi - lo <= acc.abs_tol && std::min(std::abs(glo), std::abs(ghi)) <= acc.abs_tol) return best;
    throw ConvergenceError("find_root: tolerance not met", glo, ghi);
}

double log_binomial(int n, int k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    if (n <= 1000) {
        double r = 1.0;
        for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
        if (r < 9.0e15) return std::round(r);
    }
    return std::exp(log_binomial(n, k));
}

double binomial_tail(int m, int j0, double u) {
    if (j0 <= 0) return 1.0;
    if (j0 > m) return 0.0;
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;

    const int mode = std::clamp(static_cast<int>(std::floor((m + 1) * u)), 0, m);
    const double log_u = std::log(u);
    const double log_1mu = std::log1p(-u);
    const double odds = u / (1.0 - u);
    const auto term = [&](int j) { return std::exp(log_binomial(m, j) + j * log_u + (m - j) * log_1mu); };

    if (j0 <= mode) {
        // Tail near 1: sum the lower side j < j0 downward and complement.
        double t = term(j0 - 1);
        double lower = t;
        for (int j = j0 - 1; j > 0; --j) {
            t *= static_cast<double>(j) / (m - j + 1) / odds;
            lower += t;
            if (t < 1e-18 * lower) break;
        }
        return std::max(0.0, 1.0 - lower);
    }

    double t = term(j0);
    double sum = t;
    for (int j = j0; j < m; ++j) {
        t *= static_cast<double>(m - j) / (j + 1) * odds;
        sum += t;
        if (t < 1e-18 * sum) break;
    }
    return std::min(sum, 1.0);
}

}  // namespace num
}  // namespace kfwer
