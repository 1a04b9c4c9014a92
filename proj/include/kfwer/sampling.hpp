#pragma once

// Seeded draws of test statistics and right-tailed p-values from the
// dependence models. X_i = load_i * Y + sqrt(1 - load_i^2) * Z_i (divided by a
// shared sqrt(chi2_dof / dof) for the t model) + mu_i, P_i = upper tail of X_i.

#include <cstdint>
#include <span>
#include <vector>

#include "kfwer/null_models.hpp"
#include "kfwer/rng.hpp"

namespace kfwer {

struct SampleBatch {
    int n = 0;
    long count = 0;
    std::vector<double> statistics;  // row-major count x n
    std::vector<double> pvalues;     // row-major count x n

    std::span<const double> stats_row(long r) const { return {statistics.data() + r * n, static_cast<std::size_t>(n)}; }
    std::span<const double> pvalue_row(long r) const { return {pvalues.data() + r * n, static_cast<std::size_t>(n)}; }
};

class PValueSampler {
public:
    // model: independent, equicorrelated_normal, factor_normal or equicorrelated_t.
    // mu empty means all zero; otherwise its length must equal n.
    PValueSampler(const NullModel& model, int n, std::vector<double> mu = {});

    int n() const noexcept { return n_; }
    const NullModel& model() const noexcept { return model_; }

    // Replicate `index` of the stream keyed by `seed`. Either output may be empty.
    void draw(std::uint64_t seed, std::uint64_t index, std::span<double> statistics, std::span<double> pvalues) const;

    // Draws max_i P_i over all n coordinates, using one tail evaluation.
    double draw_max_pvalue(std::uint64_t seed, std::uint64_t index) const;

    // Upper-tail probability of a statistic under this model's marginal.
    double upper_tail(double x) const;

private:
    void draw_statistics(std::uint64_t seed, std::uint64_t index, std::span<double> out) const;

    NullModel model_;
    int n_;
    bool student_t_ = false;
    std::vector<double> load_;
    std::vector<double> resid_;
    std::vector<double> mu_;
    std::vector<double> zero_;
};

SampleBatch sample_equicorr_normal(int n, double rho, std::span<const double> mu, long count, std::uint64_t seed);
SampleBatch sample_factor_normal(std::span<const double> loadings, std::span<const double> mu, long count,
                                 std::uint64_t seed);
SampleBatch sample_equicorr_t(int n, double rho, int dof, std::span<const double> mu, long count, std::uint64_t seed);

// Generic batch for any sampler.
SampleBatch sample_batch(const PValueSampler& sampler, long count, std::uint64_t seed);

}  // namespace kfwer
