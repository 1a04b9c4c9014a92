#include "kfwer/procedures.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace kfwer {

namespace {

void check_lengths(std::size_t n, const CriticalValueSet& c) {
    if (static_cast<int>(n) != c.n) {
        throw ConfigError("p-value count " + std::to_string(n) + " differs from critical value set length " +
                          std::to_string(c.n));
    }
}

DecisionReport build_report(std::span<const PValueEntry> p, const CriticalValueSet& c, int rejected,
                            std::optional<int> cutoff) {
    DecisionReport r;
    r.procedure = c.procedure;
    r.n = c.n;
    r.k = c.k;
    r.alpha = c.alpha;
    r.model = c.model;
    r.num_rejected = rejected;
    r.cutoff = cutoff;
    const auto sorted = sorted_by_p(p);
    r.rows.reserve(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const int rank = static_cast<int>(i) + 1;
        r.rows.push_back({sorted[i].id, sorted[i].p, rank, c.padded[i], rank <= rejected});
    }
    return r;
}

std::vector<double> sorted_values(std::span<const PValueEntry> p) {
    std::vector<double> v;
    v.reserve(p.size());
    for (const auto& e : sorted_by_p(p)) v.push_back(e.p);
    return v;
}

}  // namespace

void validate_pvalues(std::span<const PValueEntry> p) {
    if (p.empty()) throw ConfigError("no p-values supplied");
    std::unordered_set<std::string> seen;
    for (const auto& e : p) {
        if (!(e.p >= 0.0 && e.p <= 1.0)) throw ConfigError("p-value for '" + e.id + "' is outside [0,1]");
        if (!seen.insert(e.id).second) throw ConfigError("duplicate id '" + e.id + "'");
    }
}

std::vector<PValueEntry> sorted_by_p(std::span<const PValueEntry> p) {
    std::vector<PValueEntry> v(p.begin(), p.end());
    std::stable_sort(v.begin(), v.end(), [](const PValueEntry& a, const PValueEntry& b) {
        if (a.p != b.p) return a.p < b.p;
        return a.id < b.id;
    });
    return v;
}

int stepup_count(std::span<const double> sorted_p, std::span<const double> padded) {
    for (std::size_t i = sorted_p.size(); i > 0; --i) {
        if (sorted_p[i - 1] <= padded[i - 1]) return static_cast<int>(i);
    }
    return 0;
}

int stepdown_count(std::span<const double> sorted_p, std::span<const double> padded) {
    for (std::size_t j = 0; j < sorted_p.size(); ++j) {
        if (sorted_p[j] >= padded[j]) return static_cast<int>(j);
    }
    return static_cast<int>(sorted_p.size());
}

int single_step_count(std::span<const double> sorted_p, double threshold) {
    return static_cast<int>(std::upper_bound(sorted_p.begin(), sorted_p.end(), threshold) - sorted_p.begin());
}

int rejection_count(ApplyRule rule, std::span<const double> sorted_p, const CriticalValueSet& c) {
    switch (rule) {
        case ApplyRule::step_up: return stepup_count(sorted_p, c.padded);
        case ApplyRule::step_down: return stepdown_count(sorted_p, c.padded);
        case ApplyRule::single_step: return single_step_count(sorted_p, c.values.front());
    }
    return 0;
}

DecisionReport stepup_apply(std::span<const PValueEntry> p, const CriticalValueSet& c) {
    validate_pvalues(p);
    check_lengths(p.size(), c);
    const auto v = sorted_values(p);
    const int i0 = stepup_count(v, c.padded);
    return build_report(p, c, i0, i0 > 0 ? std::optional<int>(i0) : std::nullopt);
}

DecisionReport stepdown_apply(std::span<const PValueEntry> p, const CriticalValueSet& c) {
    validate_pvalues(p);
    check_lengths(p.size(), c);
    const auto v = sorted_values(p);
    const int r = stepdown_count(v, c.padded);
    return build_report(p, c, r, r > 0 ? std::optional<int>(r) : std::nullopt);
}

DecisionReport single_step_apply(std::span<const PValueEntry> p, const CriticalValueSet& c) {
    validate_pvalues(p);
    check_lengths(p.size(), c);
    const auto v = sorted_values(p);
    const int r = single_step_count(v, c.values.front());
    auto report = build_report(p, c, r, r > 0 ? std::optional<int>(r) : std::nullopt);
    // Every hypothesis is compared with the same threshold.
    for (auto& row : report.rows) row.critical_value = c.values.front();
    return report;
}

DecisionReport apply_procedure(std::span<const PValueEntry> p, const CriticalValueSet& c) {
    switch (apply_rule(c.procedure)) {
        case ApplyRule::step_up: return stepup_apply(p, c);
        case ApplyRule::step_down: return stepdown_apply(p, c);
        case ApplyRule::single_step: return single_step_apply(p, c);
    }
    throw ConfigError("unknown decision rule");
}

bool global_simes_test(std::span<const PValueEntry> p, const CriticalValueSet& c) {
    validate_pvalues(p);
    check_lengths(p.size(), c);
    return stepup_count(sorted_values(p), c.padded) >= 1;
}

}  // namespace kfwer
