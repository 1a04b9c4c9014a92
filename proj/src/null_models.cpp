#include "kfwer/null_models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <sstream>

#include "kfwer/parallel.hpp"
#include "kfwer/sampling.hpp"
#include "kfwer/simd/kernels.hpp"

namespace kfwer {

struct NullModel::TCache {
    std::mutex mutex;
    std::map<int, std::shared_ptr<const EmpiricalStore>> stores;
};

namespace {

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_short(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

void check_k(int k) {
    if (k < 1) throw ConfigError("k must be a positive integer");
}

// Integral of prod_j Q((t - load_j y) / sqrt(1 - load_j^2)) phi(y) dy.
double factor_product_integral(double t, std::span<const double> loads) {
    thread_local std::vector<double> term;
    return num::integrate_gaussian_batch(
        [t, loads](std::span<const double> nodes, std::span<double> values) {
            term.resize(nodes.size());
            const double l0 = loads[0];
            simd::shifted_normal_sf(t, l0, 1.0 / std::sqrt(1.0 - l0 * l0), nodes, values);
            for (std::size_t j = 1; j < loads.size(); ++j) {
                const double l = loads[j];
                // Repeated loadings reuse the last factor column.
                if (l != loads[j - 1]) simd::shifted_normal_sf(t, l, 1.0 / std::sqrt(1.0 - l * l), nodes, term);
                else if (j == 1) std::copy(values.begin(), values.end(), term.begin());
                simd::multiply_inplace(values, term);
            }
        },
        gk_quadrature_accuracy());
}

double equicorrelated_gk(double rho, int k, double u) {
    if (rho == 0.0) return std::pow(u, k);
    const double t = num::normal_isf(u);
    const double load = std::sqrt(rho);
    const double inv_scale = 1.0 / std::sqrt(1.0 - rho);
    thread_local std::vector<double> base;
    return num::integrate_gaussian_batch(
        [&](std::span<const double> nodes, std::span<double> values) {
            base.resize(nodes.size());
            simd::shifted_normal_sf(t, load, inv_scale, nodes, base);
            std::copy(base.begin(), base.end(), values.begin());
            for (int j = 1; j < k; ++j) simd::multiply_inplace(values, base);
        },
        gk_quadrature_accuracy());
}

double empirical_cdf(const EmpiricalStore& store, int k, double u) {
    if (store.k != k) {
        throw ConfigError("empirical G_k was built for k=" + std::to_string(store.k) + ", requested k=" +
                          std::to_string(k));
    }
    const auto& v = store.sorted_max;
    const auto it = std::upper_bound(v.begin(), v.end(), u);
    return static_cast<double>(it - v.begin()) / static_cast<double>(v.size());
}

double empirical_quantile(const EmpiricalStore& store, int k, double target) {
    if (store.k != k) {
        throw ConfigError("empirical G_k was built for k=" + std::to_string(store.k) + ", requested k=" +
                          std::to_string(k));
    }
    const auto& v = store.sorted_max;
    const double pos = std::ceil(target * static_cast<double>(v.size()));
    const std::size_t idx = static_cast<std::size_t>(std::clamp(pos, 1.0, static_cast<double>(v.size()))) - 1;
    return v[idx];
}

}  // namespace

std::string_view model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::independent: return "independent";
        case ModelKind::equicorrelated_normal: return "equicorrelated_normal";
        case ModelKind::factor_normal: return "factor_normal";
        case ModelKind::equicorrelated_t: return "equicorrelated_t";
        case ModelKind::empirical: return "empirical";
    }
    return "unknown";
}

NullModel NullModel::independent() { return NullModel{}; }

NullModel NullModel::equicorrelated_normal(double rho) {
    if (!(rho >= 0.0 && rho <= kMaxRho)) {
        throw ConfigError("equicorrelated normal model needs 0 <= rho <= 0.99, got " + format_short(rho));
    }
    NullModel m;
    m.kind_ = ModelKind::equicorrelated_normal;
    m.rho_ = rho;
    return m;
}

NullModel NullModel::factor_normal(std::vector<double> loadings) {
    if (loadings.empty()) throw ConfigError("factor model needs at least one loading");
    for (double l : loadings) {
        if (!(l > 0.0 && l < 1.0)) throw ConfigError("factor loadings must lie in (0,1), got " + format_short(l));
    }
    NullModel m;
    m.kind_ = ModelKind::factor_normal;
    m.loadings_ = std::move(loadings);
    return m;
}

NullModel NullModel::equicorrelated_t(double rho, int dof, long samples, std::uint64_t seed) {
    if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("t model needs 0 <= rho < 1");
    if (dof < 1) throw ConfigError("t model needs dof >= 1");
    if (samples < 1000) throw ConfigError("empirical G_k needs at least 1000 samples");
    NullModel m;
    m.kind_ = ModelKind::equicorrelated_t;
    m.rho_ = rho;
    m.dof_ = dof;
    m.t_samples_ = samples;
    m.t_seed_ = seed;
    m.t_cache_ = std::make_shared<TCache>();
    return m;
}

NullModel NullModel::empirical(std::shared_ptr<const EmpiricalStore> store) {
    if (!store || store->sorted_max.empty()) throw ConfigError("empirical model needs a non-empty store");
    NullModel m;
    m.kind_ = ModelKind::empirical;
    m.store_ = std::move(store);
    return m;
}

std::shared_ptr<const EmpiricalStore> NullModel::t_store(int k) const {
    if (kind_ != ModelKind::equicorrelated_t) throw ConfigError("t_store requires a t model");
    std::lock_guard lock(t_cache_->mutex);
    auto& slot = t_cache_->stores[k];
    if (!slot) {
        NullModel sampler = *this;
        slot = gk_empirical_build(sampler, k, t_samples_, t_seed_).store();
    }
    return slot;
}

std::string NullModel::describe() const {
    switch (kind_) {
        case ModelKind::independent: return "independent";
        case ModelKind::equicorrelated_normal: return "equicorr:" + format_short(rho_);
        case ModelKind::factor_normal: return "factor(n=" + std::to_string(loadings_.size()) + ")";
        case ModelKind::equicorrelated_t:
            return "t:" + format_short(rho_) + ":" + std::to_string(dof_) + ":" + std::to_string(t_samples_) + ":" +
                   std::to_string(t_seed_);
        case ModelKind::empirical: return "empirical(" + store_->source + ")";
    }
    return "unknown";
}

std::string NullModel::key() const {
    std::ostringstream os;
    os << model_kind_name(kind_);
    switch (kind_) {
        case ModelKind::independent: break;
        case ModelKind::equicorrelated_normal: os << ':' << format_real(rho_); break;
        case ModelKind::factor_normal:
            for (double l : loadings_) os << ':' << format_real(l);
            break;
        case ModelKind::equicorrelated_t:
            os << ':' << format_real(rho_) << ':' << dof_ << ':' << t_samples_ << ':' << t_seed_;
            break;
        case ModelKind::empirical:
            os << ':' << store_->source << ':' << store_->k << ':' << store_->seed << ':' << store_->sorted_max.size()
               << ':' << static_cast<const void*>(store_.get());
            break;
    }
    return os.str();
}

namespace {
std::mutex g_accuracy_mutex;
AccuracySpec g_accuracy{1e-17, 1e-13, 8};
}  // namespace

AccuracySpec gk_quadrature_accuracy() {
    std::lock_guard lock(g_accuracy_mutex);
    return g_accuracy;
}

void set_gk_quadrature_accuracy(const AccuracySpec& acc) {
    acc.validate();
    std::lock_guard lock(g_accuracy_mutex);
    g_accuracy = acc;
}

double gk_evaluate(const NullModel& model, int k, double u) {
    check_k(k);
    if (std::isnan(u)) throw DomainError("gk_evaluate: u is NaN");
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    switch (model.kind()) {
        case ModelKind::independent: return std::pow(u, k);
        case ModelKind::equicorrelated_normal: return equicorrelated_gk(model.rho(), k, u);
        case ModelKind::factor_normal: return gk_factor_averaged(model, k, u);
        case ModelKind::equicorrelated_t: return empirical_cdf(*model.t_store(k), k, u);
        case ModelKind::empirical: return empirical_cdf(*model.store(), k, u);
    }
    return 0.0;
}

double gk_quantile(const NullModel& model, int k, double target) {
    check_k(k);
    if (!(target > 0.0 && target < 1.0)) throw DomainError("gk_quantile: target must lie in (0,1)");
    switch (model.kind()) {
        case ModelKind::independent: return std::pow(target, 1.0 / k);
        case ModelKind::equicorrelated_t: return empirical_quantile(*model.t_store(k), k, target);
        case ModelKind::empirical: return empirical_quantile(*model.store(), k, target);
        case ModelKind::equicorrelated_normal:
            if (model.rho() == 0.0) return std::pow(target, 1.0 / k);
            break;
        case ModelKind::factor_normal: break;
    }
    // Relative residual keeps tiny targets (e.g. alpha / C(100,3)) as accurate as large ones.
    const auto residual = [&](double u) { return gk_evaluate(model, k, u) / target - 1.0; };
    return num::find_root(residual, 0.0, 1.0, AccuracySpec{1e-11, 1e-11, 8});
}

double gk_factor_subset(const NullModel& model, std::span<const int> subset, double u) {
    if (model.kind() != ModelKind::factor_normal) throw ConfigError("gk_factor_subset requires a factor model");
    if (subset.empty()) throw ConfigError("subset must be non-empty");
    const auto& loadings = model.loadings();
    std::vector<double> loads;
    loads.reserve(subset.size());
    int previous = 0;
    for (int idx : subset) {
        if (idx <= previous || idx > static_cast<int>(loadings.size())) {
            throw ConfigError("subset indices must be strictly increasing within [1, n]");
        }
        loads.push_back(loadings[idx - 1]);
        previous = idx;
    }
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    std::sort(loads.begin(), loads.end());
    return factor_product_integral(num::normal_isf(u), loads);
}

double gk_factor_averaged(const NullModel& model, int k, double u) {
    if (model.kind() != ModelKind::factor_normal) throw ConfigError("gk_factor_averaged requires a factor model");
    check_k(k);
    const auto& loadings = model.loadings();
    const int n = static_cast<int>(loadings.size());
    if (k > n) throw ConfigError("k exceeds the number of loadings");
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;

    // Distinct loading values and their multiplicities.
    std::vector<double> sorted = loadings;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> values;
    std::vector<int> counts;
    for (double l : sorted) {
        if (values.empty() || l != values.back()) {
            values.push_back(l);
            counts.push_back(0);
        }
        ++counts.back();
    }
    const int d = static_cast<int>(values.size());
    const double t = num::normal_isf(u);
    const double log_total = num::log_binomial(n, k);

    // Enumerate compositions m_1 + ... + m_d = k with m_j <= counts[j].
    std::vector<int> m(d, 0);
    std::vector<double> loads;
    double sum = 0.0;
    auto visit = [&](auto&& self, int j, int remaining) -> void {
        if (j == d - 1) {
            if (remaining > counts[j]) return;
            m[j] = remaining;
            double log_w = -log_total;
            loads.clear();
            for (int i = 0; i < d; ++i) {
                log_w += num::log_binomial(counts[i], m[i]);
                loads.insert(loads.end(), m[i], values[i]);
            }
            sum += std::exp(log_w) * factor_product_integral(t, loads);
            return;
        }
        for (int take = std::min(remaining, counts[j]); take >= 0; --take) {
            m[j] = take;
            self(self, j + 1, remaining - take);
        }
    };
    visit(visit, 0, k);
    return sum;
}

NullModel gk_empirical_build(const NullModel& sampler_model, int k, long sample_size, std::uint64_t seed) {
    check_k(k);
    if (sample_size < 1000) throw ConfigError("gk_empirical_build: sample_size must be at least 1000");
    const PValueSampler sampler(sampler_model, k);
    auto store = std::make_shared<EmpiricalStore>();
    store->k = k;
    store->seed = seed;
    store->source = sampler_model.describe();
    store->sorted_max.resize(sample_size);
    parallel_chunks(sample_size, 1 << 16, [&](std::int64_t, std::int64_t begin, std::int64_t end) {
        for (std::int64_t r = begin; r < end; ++r) {
            store->sorted_max[r] = sampler.draw_max_pvalue(seed, static_cast<std::uint64_t>(r));
        }
    });
    std::sort(store->sorted_max.begin(), store->sorted_max.end());
    return NullModel::empirical(std::move(store));
}

}  // namespace kfwer
