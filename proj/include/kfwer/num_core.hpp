#pragma once

// Scalar numerical kernels shared by every other module: the standard normal
// distribution, Gaussian-weight integration, monotone root finding and
// binomial tail sums.

#include <functional>
#include <span>

#include "kfwer/errors.hpp"

namespace kfwer {

// A value in [0,1]. Construction validates the range.
class Probability {
public:
    constexpr Probability() = default;
    explicit Probability(double value);

    constexpr double value() const noexcept { return value_; }
    constexpr operator double() const noexcept { return value_; }

private:
    double value_ = 0.0;
};

struct AccuracySpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-9;
    int max_refinements = 8;

    // Throws ConfigError when a field is out of range.
    void validate() const;
};

namespace num {

double normal_pdf(double x);

// Phi(x). Throws DomainError for non-finite x.
double normal_cdf(double x);

// 1 - Phi(x), accurate in the upper tail.
double normal_sf(double x);

// Phi^{-1}(p) for 0 < p < 1; DomainError otherwise.
double normal_quantile(double p);

// Phi^{-1}(1 - q) computed without forming 1 - q.
double normal_isf(double q);

// Fills values[i] = f(nodes[i]).
using BatchIntegrand = std::function<void(std::span<const double> nodes, std::span<double> values)>;

/// Integral of f(y) phi(y) over the real line.
///
/// Gauss-Hermite rules for the standard normal weight, starting at 64 nodes and
/// doubling until two successive estimates differ by at most
/// max(abs_tol, rel_tol * |estimate|). Throws ConvergenceError carrying the last
/// two estimates if max_refinements doublings do not suffice.
double integrate_gaussian(const std::function<double(double)>& f, const AccuracySpec& acc = {});
double integrate_gaussian_batch(const BatchIntegrand& f, const AccuracySpec& acc = {});

/// Root of a monotone g on [lo, hi] by bisection with secant (Illinois) steps.
///
/// Returns x with |g(x)| <= abs_tol and final bracket width <= abs_tol (or an
/// exact zero). Throws BracketError if g(lo), g(hi) have the same strict sign,
/// ConvergenceError if the tolerance cannot be met.
double find_root(const std::function<double(double)>& g, double lo, double hi, const AccuracySpec& acc = {});

// log C(n, k) via lgamma.
double log_binomial(int n, int k);

// C(n, k) as a double (exact for moderate n).
double binomial(int n, int k);

// sum_{j=j0}^{m} C(m,j) u^j (1-u)^(m-j), summed outward from the mode in log space.
double binomial_tail(int m, int j0, double u);

}  // namespace num
}  // namespace kfwer
