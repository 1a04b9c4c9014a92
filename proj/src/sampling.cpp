#include "kfwer/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/distributions/students_t.hpp>

#include "kfwer/errors.hpp"
#include "kfwer/parallel.hpp"
#include "kfwer/simd/kernels.hpp"

namespace kfwer {

PValueSampler::PValueSampler(const NullModel& model, int n, std::vector<double> mu)
    : model_(model), n_(n), mu_(std::move(mu)) {
    if (n < 1) throw ConfigError("sampler needs n >= 1");
    if (mu_.empty()) mu_.assign(n, 0.0);
    if (static_cast<int>(mu_.size()) != n) throw ConfigError("mean vector length differs from n");
    for (double m : mu_) {
        if (!std::isfinite(m)) throw ConfigError("non-finite mean");
    }
    zero_.assign(n, 0.0);
    load_.resize(n);
    resid_.resize(n);
    switch (model.kind()) {
        case ModelKind::independent:
            std::fill(load_.begin(), load_.end(), 0.0);
            std::fill(resid_.begin(), resid_.end(), 1.0);
            break;
        case ModelKind::equicorrelated_normal:
        case ModelKind::equicorrelated_t:
            std::fill(load_.begin(), load_.end(), std::sqrt(model.rho()));
            std::fill(resid_.begin(), resid_.end(), std::sqrt(1.0 - model.rho()));
            student_t_ = model.kind() == ModelKind::equicorrelated_t;
            break;
        case ModelKind::factor_normal:
            if (static_cast<int>(model.loadings().size()) < n) {
                throw ConfigError("factor model has fewer loadings than coordinates");
            }
            for (int i = 0; i < n; ++i) {
                load_[i] = model.loadings()[i];
                resid_[i] = std::sqrt(1.0 - load_[i] * load_[i]);
            }
            break;
        case ModelKind::empirical:
            throw ConfigError("an empirical G_k model cannot generate samples");
    }
}

void PValueSampler::draw_statistics(std::uint64_t seed, std::uint64_t index, std::span<double> out) const {
    thread_local std::vector<double> z;
    z.resize(n_);
    Xoshiro256 rng = substream(seed, index);
    std::normal_distribution<double> normal;
    const double common = normal(rng);
    for (double& v : z) v = normal(rng);
    if (!student_t_) {
        simd::factor_combine(common, load_, resid_, z, mu_, out);
        return;
    }
    std::chi_squared_distribution<double> chi2(model_.dof());
    const double inv_scale = 1.0 / std::sqrt(chi2(rng) / model_.dof());
    simd::factor_combine(common, load_, resid_, z, zero_, out);
    for (int i = 0; i < n_; ++i) out[i] = out[i] * inv_scale + mu_[i];
}

double PValueSampler::upper_tail(double x) const {
    if (!student_t_) return num::normal_sf(x);
    const boost::math::students_t dist(model_.dof());
    return boost::math::cdf(boost::math::complement(dist, x));
}

void PValueSampler::draw(std::uint64_t seed, std::uint64_t index, std::span<double> statistics,
                         std::span<double> pvalues) const {
    thread_local std::vector<double> scratch;
    std::span<double> stats = statistics;
    if (stats.empty()) {
        scratch.resize(n_);
        stats = scratch;
    }
    if (static_cast<int>(stats.size()) != n_) throw ConfigError("statistics buffer has wrong length");
    draw_statistics(seed, index, stats);
    if (pvalues.empty()) return;
    if (static_cast<int>(pvalues.size()) != n_) throw ConfigError("p-value buffer has wrong length");
    if (!student_t_) {
        simd::normal_sf(stats, pvalues);
    } else {
        for (int i = 0; i < n_; ++i) pvalues[i] = upper_tail(stats[i]);
    }
}

double PValueSampler::draw_max_pvalue(std::uint64_t seed, std::uint64_t index) const {
    thread_local std::vector<double> stats;
    stats.resize(n_);
    draw_statistics(seed, index, stats);
    return upper_tail(*std::min_element(stats.begin(), stats.end()));
}

SampleBatch sample_batch(const PValueSampler& sampler, long count, std::uint64_t seed) {
    if (count < 1) throw ConfigError("sample count must be positive");
    SampleBatch batch;
    batch.n = sampler.n();
    batch.count = count;
    batch.statistics.resize(static_cast<std::size_t>(count) * batch.n);
    batch.pvalues.resize(batch.statistics.size());
    const std::size_t n = batch.n;
    parallel_chunks(count, 4096, [&](std::int64_t, std::int64_t begin, std::int64_t end) {
        for (std::int64_t r = begin; r < end; ++r) {
            sampler.draw(seed, static_cast<std::uint64_t>(r), {batch.statistics.data() + r * n, n},
                         {batch.pvalues.data() + r * n, n});
        }
    });
    return batch;
}

namespace {

std::vector<double> mean_vector(std::span<const double> mu) { return {mu.begin(), mu.end()}; }

void check_rho(double rho) {
    if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("rho must lie in [0,1)");
}

}  // namespace

SampleBatch sample_equicorr_normal(int n, double rho, std::span<const double> mu, long count, std::uint64_t seed) {
    check_rho(rho);
    const NullModel model = rho == 0.0 ? NullModel::independent() : NullModel::equicorrelated_normal(rho);
    return sample_batch(PValueSampler(model, n, mean_vector(mu)), count, seed);
}

SampleBatch sample_factor_normal(std::span<const double> loadings, std::span<const double> mu, long count,
                                 std::uint64_t seed) {
    const NullModel model = NullModel::factor_normal({loadings.begin(), loadings.end()});
    return sample_batch(PValueSampler(model, static_cast<int>(loadings.size()), mean_vector(mu)), count, seed);
}

SampleBatch sample_equicorr_t(int n, double rho, int dof, std::span<const double> mu, long count, std::uint64_t seed) {
    check_rho(rho);
    const NullModel model = NullModel::equicorrelated_t(rho, dof);
    return sample_batch(PValueSampler(model, n, mean_vector(mu)), count, seed);
}

}  // namespace kfwer
