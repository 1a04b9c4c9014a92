#pragma once

// Reference values for the probability that at least one order statistic
// crosses its constant: Monte Carlo on both sides of the subset identity, an
// exact small-n oracle for uniforms, and the two upper bounds.

#include <cstdint>
#include <functional>
#include <vector>

#include "kfwer/sampling.hpp"

namespace kfwer {

// Constants c_k <= ... <= c_n on the p-value scale.
struct CriticalVector {
    int n = 0;
    int k = 0;
    std::vector<double> c;  // c[i - k] = c_i

    CriticalVector() = default;
    // Throws ConfigError unless c has n - k + 1 nondecreasing entries.
    CriticalVector(int n, int k, std::vector<double> c);

    double at(int i) const { return c[i - k]; }
};

enum class EstimateMethod { monte_carlo, exact_quadrature, closed_form };

struct ProbEstimate {
    double value = 0.0;
    double std_error = 0.0;
    long reps = 0;
    EstimateMethod method = EstimateMethod::closed_form;
};

/// Pr{ P_(i) <= c_i for some i = k..n } by simulation (reps >= 10^4).
ProbEstimate union_prob_mc(const PValueSampler& sampler, const CriticalVector& cv, long reps, std::uint64_t seed);

/// The subset-sum form of the same probability, estimated from one stream:
///   a_n^{-1} sum_J I(X_{k:J} <= c_n)
///   + sum_J sum_{i=k}^{n-1} [a_i^{-1} I(X_{k:J} <= c_i, E_i) - a_{i+1}^{-1} I(X_{k:J} <= c_{i+1}, E_i)]
/// with E_i = {X_{i-k+1:J^c} > c_{i+1}, ..., X_{n-k:J^c} > c_n}, a_i = C(i,k).
/// The standard error is the sample SE of the per-replication total.
/// n <= 8 (ScaleError otherwise), reps >= 10^5.
ProbEstimate lemma21_rhs_mc(const PValueSampler& sampler, const CriticalVector& cv, long reps, std::uint64_t seed);

/// Exact union probability for n <= 4 i.i.d. uniforms: nested Gauss-Legendre over
/// the ordered-uniform simplex split at the constants (the integrand is piecewise
/// polynomial, so each piece is integrated exactly). ScaleError for n > 4.
ProbEstimate union_prob_exact_smalln(const CriticalVector& cv);

// C(n,k) [F(c_k) + sum_{i=k+1}^{n} (F(c_i) - F(c_{i-1})) / C(i,k)]
double bound_eq22(const std::function<double(double)>& Fk, const CriticalVector& cv);

// min(1, C(n,k) * G_k(c_k))
double bonferroni_eq23(double gk_at_ck, int n, int k);

}  // namespace kfwer
