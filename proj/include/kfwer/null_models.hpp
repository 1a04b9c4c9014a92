#pragma once

// Null joint-maximum CDFs G_k(u) = Pr{max of any k null p-values <= u} and their
// quantile inversions, for each supported dependence model.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "kfwer/num_core.hpp"

namespace kfwer {

enum class ModelKind { independent, equicorrelated_normal, factor_normal, equicorrelated_t, empirical };

std::string_view model_kind_name(ModelKind kind);

// Sorted draws of max(P_1, ..., P_k) under the null.
struct EmpiricalStore {
    int k = 0;
    std::uint64_t seed = 0;
    std::string source;
    std::vector<double> sorted_max;
};

class NullModel {
public:
    static constexpr double kMaxRho = 0.99;
    static constexpr long kDefaultTSamples = 10'000'000;

    static NullModel independent();
    // 0 <= rho <= 0.99
    static NullModel equicorrelated_normal(double rho);
    // Every loading strictly inside (0,1); correlations are loading_i * loading_j.
    static NullModel factor_normal(std::vector<double> loadings);
    // Central multivariate t over an equicorrelated normal. G_k comes from a
    // seeded empirical build of `samples` draws, made lazily per k.
    static NullModel equicorrelated_t(double rho, int dof, long samples = kDefaultTSamples, std::uint64_t seed = 1);
    static NullModel empirical(std::shared_ptr<const EmpiricalStore> store);

    ModelKind kind() const noexcept { return kind_; }
    double rho() const noexcept { return rho_; }
    const std::vector<double>& loadings() const noexcept { return loadings_; }
    int dof() const noexcept { return dof_; }
    long t_samples() const noexcept { return t_samples_; }
    std::uint64_t t_seed() const noexcept { return t_seed_; }
    const std::shared_ptr<const EmpiricalStore>& store() const noexcept { return store_; }

    // Empirical store backing a t model at this k (built on first request).
    std::shared_ptr<const EmpiricalStore> t_store(int k) const;

    // Short human-readable label, e.g. "equicorr:0.25".
    std::string describe() const;
    // Full identity, suitable as a cache key.
    std::string key() const;

private:
    struct TCache;

    ModelKind kind_ = ModelKind::independent;
    double rho_ = 0.0;
    std::vector<double> loadings_;
    int dof_ = 0;
    long t_samples_ = 0;
    std::uint64_t t_seed_ = 0;
    std::shared_ptr<const EmpiricalStore> store_;
    std::shared_ptr<TCache> t_cache_;
};

// Quadrature accuracy used for every G_k integral. The setter is process-wide;
// call clear_critval_cache() afterwards if critical values were already built.
AccuracySpec gk_quadrature_accuracy();
void set_gk_quadrature_accuracy(const AccuracySpec& acc);

/// G_k(u) for the model. Values outside (0,1) clamp to G(0)=0, G(1)=1.
/// Factor models return the subset-averaged CDF (gk_factor_averaged).
double gk_evaluate(const NullModel& model, int k, double u);

/// q with G_k(q) = target, 0 < target < 1. Empirical models return the
/// empirical quantile; independence uses target^(1/k).
double gk_quantile(const NullModel& model, int k, double target);

// Pr{max_{i in J} P_i <= u} for a factor model; J holds 1-based, strictly increasing indices.
double gk_factor_subset(const NullModel& model, std::span<const int> subset, double u);

// Average of gk_factor_subset over all size-k subsets, grouped by loading value.
double gk_factor_averaged(const NullModel& model, int k, double u);

/// Empirical G_k from `sample_size` null draws of the first k coordinates of
/// `sampler` (independent, equicorrelated normal, factor or t). Deterministic
/// in `seed`; draw r uses substream(seed, r).
NullModel gk_empirical_build(const NullModel& sampler, int k, long sample_size, std::uint64_t seed);

}  // namespace kfwer
