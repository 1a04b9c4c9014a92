#include "kfwer/crit_values.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <tuple>

namespace kfwer {

namespace {

struct NameEntry {
    ProcedureId id;
    std::string_view name;
};

constexpr NameEntry kNames[] = {
    {ProcedureId::gen_simes, "gen-simes"},
    {ProcedureId::gen_hochberg_stepup, "gen-hochberg-stepup"},
    {ProcedureId::gen_holm_stepdown, "gen-holm-stepdown"},
    {ProcedureId::gen_single_step, "gen-single-step"},
    {ProcedureId::lr_stepdown, "lr-stepdown"},
    {ProcedureId::lr_stepup, "lr-stepup"},
    {ProcedureId::romano_stepdown, "romano-stepdown"},
    {ProcedureId::classic_simes, "classic-simes"},
    {ProcedureId::classic_holm, "classic-holm"},
    {ProcedureId::classic_hochberg, "classic-hochberg"},
};

constexpr NameEntry kAliases[] = {
    {ProcedureId::gen_hochberg_stepup, "gen-hochberg"},
    {ProcedureId::gen_holm_stepdown, "gen-holm"},
    {ProcedureId::romano_stepdown, "romano"},
    {ProcedureId::classic_simes, "simes"},
    {ProcedureId::classic_holm, "holm"},
    {ProcedureId::classic_hochberg, "hochberg"},
};

void check_args(int n, int k, double alpha) {
    if (n < 1) throw ConfigError("n must be at least 1");
    if (k < 1) throw ConfigError("k must be at least 1");
    if (n < k) {
        throw ConfigError("n < k: n=" + std::to_string(n) + " is smaller than k=" + std::to_string(k));
    }
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
}

CriticalValueSet make_set(ProcedureId id, int n, int k, double alpha, std::string model) {
    CriticalValueSet s;
    s.procedure = id;
    s.n = n;
    s.k = k;
    s.alpha = alpha;
    s.model = std::move(model);
    s.values.resize(n - k + 1);
    return s;
}

void finish(CriticalValueSet& s) {
    // Guard against round-off reversing neighbouring roots.
    for (std::size_t j = 1; j < s.values.size(); ++j) s.values[j] = std::max(s.values[j], s.values[j - 1]);
    s.padded.resize(s.n);
    for (int i = 1; i <= s.n; ++i) s.padded[i - 1] = s.values[std::max(i, s.k) - s.k];
}

// Solves G_k(u) = target by root finding, or returns the empirical quantile.
double invert(const NullModel& model, int k, double target, int index) {
    try {
        if (model.kind() == ModelKind::empirical || model.kind() == ModelKind::equicorrelated_t) {
            return gk_quantile(model, k, target);
        }
        const auto residual = [&](double u) { return gk_evaluate(model, k, u) / target - 1.0; };
        return num::find_root(residual, 0.0, 1.0, AccuracySpec{1e-12, 1e-12, 8});
    } catch (const ConvergenceError& e) {
        throw ConvergenceError(std::string(e.what()) + " (critical value index i=" + std::to_string(index) + ")",
                               e.previous_estimate(), e.last_estimate());
    } catch (const NumericalError& e) {
        throw NumericalError(std::string(e.what()) + " (critical value index i=" + std::to_string(index) + ")");
    }
}

bool independent_like(const NullModel& model) {
    return model.kind() == ModelKind::independent ||
           (model.kind() == ModelKind::equicorrelated_normal && model.rho() == 0.0);
}

}  // namespace

std::string_view procedure_name(ProcedureId id) {
    for (const auto& e : kNames) {
        if (e.id == id) return e.name;
    }
    return "unknown";
}

ProcedureId parse_procedure(std::string_view text) {
    std::string s(text);
    std::replace(s.begin(), s.end(), '_', '-');
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (const auto& e : kNames) {
        if (e.name == s) return e.id;
    }
    for (const auto& e : kAliases) {
        if (e.name == s) return e.id;
    }
    throw ConfigError("unknown procedure '" + std::string(text) + "'");
}

const std::vector<ProcedureId>& all_procedures() {
    static const std::vector<ProcedureId> ids = [] {
        std::vector<ProcedureId> v;
        for (const auto& e : kNames) v.push_back(e.id);
        return v;
    }();
    return ids;
}

ApplyRule apply_rule(ProcedureId id) {
    switch (id) {
        case ProcedureId::gen_simes:
        case ProcedureId::gen_hochberg_stepup:
        case ProcedureId::lr_stepup:
        case ProcedureId::classic_simes:
        case ProcedureId::classic_hochberg: return ApplyRule::step_up;
        case ProcedureId::gen_holm_stepdown:
        case ProcedureId::lr_stepdown:
        case ProcedureId::romano_stepdown:
        case ProcedureId::classic_holm: return ApplyRule::step_down;
        case ProcedureId::gen_single_step: return ApplyRule::single_step;
    }
    return ApplyRule::step_up;
}

bool uses_null_model(ProcedureId id) {
    return id == ProcedureId::gen_simes || id == ProcedureId::gen_hochberg_stepup ||
           id == ProcedureId::gen_holm_stepdown || id == ProcedureId::gen_single_step;
}

bool is_classic(ProcedureId id) {
    return id == ProcedureId::classic_simes || id == ProcedureId::classic_holm || id == ProcedureId::classic_hochberg;
}

CriticalValueSet gen_simes_critvals_closed_form(int n, int k, double alpha) {
    check_args(n, k, alpha);
    auto s = make_set(ProcedureId::gen_simes, n, k, alpha, "independent");
    const double log_alpha = std::log(alpha);
    for (int i = k; i <= n; ++i) {
        double acc = log_alpha;
        for (int j = 1; j <= k; ++j) acc += std::log(static_cast<double>(i - k + j) / (n - k + j));
        s.values[i - k] = std::exp(acc / k);
    }
    finish(s);
    return s;
}

CriticalValueSet gen_simes_critvals(int n, int k, double alpha, const NullModel& model, Solver solver) {
    check_args(n, k, alpha);
    if (solver == Solver::automatic && independent_like(model)) {
        auto s = gen_simes_critvals_closed_form(n, k, alpha);
        s.model = model.describe();
        return s;
    }
    auto s = make_set(ProcedureId::gen_simes, n, k, alpha, model.describe());
    const double log_an = num::log_binomial(n, k);
    for (int i = k; i <= n; ++i) {
        const double target = alpha * std::exp(num::log_binomial(i, k) - log_an);
        s.values[i - k] = invert(model, k, target, i);
    }
    finish(s);
    return s;
}

CriticalValueSet gen_hochberg_critvals_closed_form(int n, int k, double alpha, ProcedureId as) {
    check_args(n, k, alpha);
    auto s = make_set(as, n, k, alpha, "independent");
    const double log_alpha = std::log(alpha);
    for (int i = k; i <= n; ++i) {
        double acc = log_alpha;
        for (int j = 1; j <= k; ++j) acc += std::log(static_cast<double>(j) / (n - i + j));
        s.values[i - k] = std::exp(acc / k);
    }
    finish(s);
    return s;
}

CriticalValueSet gen_hochberg_critvals(int n, int k, double alpha, const NullModel& model, Solver solver,
                                       ProcedureId as) {
    check_args(n, k, alpha);
    if (as != ProcedureId::gen_hochberg_stepup && as != ProcedureId::gen_holm_stepdown &&
        as != ProcedureId::gen_single_step) {
        throw ConfigError("gen_hochberg_critvals: label must be a generalized Hochberg/Holm/single-step id");
    }
    if (solver == Solver::automatic && independent_like(model)) {
        auto s = gen_hochberg_critvals_closed_form(n, k, alpha, as);
        s.model = model.describe();
        return s;
    }
    auto s = make_set(as, n, k, alpha, model.describe());
    for (int i = k; i <= n; ++i) {
        const double target = alpha * std::exp(-num::log_binomial(n + k - i, k));
        s.values[i - k] = invert(model, k, target, i);
    }
    finish(s);
    return s;
}

CriticalValueSet lr_critvals(int n, int k, double alpha, ProcedureId as) {
    check_args(n, k, alpha);
    if (as != ProcedureId::lr_stepdown && as != ProcedureId::lr_stepup) {
        throw ConfigError("lr_critvals: label must be lr-stepdown or lr-stepup");
    }
    auto s = make_set(as, n, k, alpha, "independent");
    for (int i = k; i <= n; ++i) s.values[i - k] = k * alpha / (n - i + k);
    finish(s);
    return s;
}

CriticalValueSet romano_critvals(int n, int k, double alpha) {
    check_args(n, k, alpha);
    auto s = make_set(ProcedureId::romano_stepdown, n, k, alpha, "independent");
    for (int i = k; i <= n; ++i) {
        const int m = n - i + k;
        if (m == k) {
            s.values[i - k] = std::pow(alpha, 1.0 / k);
            continue;
        }
        const auto residual = [&](double u) { return num::binomial_tail(m, k, u) / alpha - 1.0; };
        try {
            s.values[i - k] = num::find_root(residual, 0.0, 1.0, AccuracySpec{1e-12, 1e-12, 8});
        } catch (const NumericalError& e) {
            throw NumericalError(std::string(e.what()) + " (critical value index i=" + std::to_string(i) + ")");
        }
    }
    finish(s);
    return s;
}

CriticalValueSet classic_critvals(ProcedureId procedure, int n, double alpha) {
    check_args(n, 1, alpha);
    if (!is_classic(procedure)) throw ConfigError("classic_critvals: not a classic procedure");
    auto s = make_set(procedure, n, 1, alpha, "any");
    for (int i = 1; i <= n; ++i) {
        s.values[i - 1] = procedure == ProcedureId::classic_simes ? i * alpha / n : alpha / (n - i + 1);
    }
    finish(s);
    return s;
}

namespace {

using CacheKey = std::tuple<int, int, int, double, std::string>;

struct Cache {
    std::mutex mutex;
    std::map<CacheKey, CriticalValueSet> sets;
};

Cache& cache() {
    static Cache c;
    return c;
}

CriticalValueSet build(ProcedureId procedure, int n, int k, double alpha, const NullModel& model) {
    switch (procedure) {
        case ProcedureId::gen_simes: return gen_simes_critvals(n, k, alpha, model);
        case ProcedureId::gen_hochberg_stepup:
        case ProcedureId::gen_holm_stepdown:
        case ProcedureId::gen_single_step:
            return gen_hochberg_critvals(n, k, alpha, model, Solver::automatic, procedure);
        case ProcedureId::lr_stepdown:
        case ProcedureId::lr_stepup: return lr_critvals(n, k, alpha, procedure);
        case ProcedureId::romano_stepdown: return romano_critvals(n, k, alpha);
        case ProcedureId::classic_simes:
        case ProcedureId::classic_holm:
        case ProcedureId::classic_hochberg: return classic_critvals(procedure, n, alpha);
    }
    throw ConfigError("unknown procedure");
}

}  // namespace

CriticalValueSet make_critvals(ProcedureId procedure, int n, int k, double alpha, const NullModel& model) {
    const bool classic = is_classic(procedure);
    if (classic) check_args(n, 1, alpha);
    else check_args(n, k, alpha);
    const CacheKey key{static_cast<int>(procedure), n, classic ? 1 : k, alpha,
                       uses_null_model(procedure) ? model.key() : std::string{}};
    {
        std::lock_guard lock(cache().mutex);
        if (auto it = cache().sets.find(key); it != cache().sets.end()) return it->second;
    }
    // Built outside the lock; a concurrent duplicate build yields the same set.
    CriticalValueSet s = build(procedure, n, k, alpha, model);
    std::lock_guard lock(cache().mutex);
    return cache().sets.emplace(key, std::move(s)).first->second;
}

void clear_critval_cache() {
    std::lock_guard lock(cache().mutex);
    cache().sets.clear();
}

std::size_t critval_cache_size() {
    std::lock_guard lock(cache().mutex);
    return cache().sets.size();
}

}  // namespace kfwer
