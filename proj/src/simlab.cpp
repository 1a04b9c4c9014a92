#include "kfwer/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kfwer/parallel.hpp"
#include "kfwer/procedures.hpp"
#include "kfwer/sampling.hpp"

namespace kfwer {

namespace {

constexpr std::pair<Metric, std::string_view> kMetricNames[] = {
    {Metric::power_at_least_k, "power_at_least_k"},
    {Metric::power_at_least_k_false, "power_at_least_k_false"},
    {Metric::ave_power, "ave_power"},
    {Metric::kfwer, "kfwer"},
    {Metric::partial_rejections, "partial_rejections"},
    {Metric::global_reject_rate, "global_reject_rate"},
};

constexpr std::int64_t kChunk = 2048;

// Integer tallies for one procedure; sums of integers are order independent,
// so the totals do not depend on how replications were split across threads.
struct Tally {
    long at_least_k = 0;
    long at_least_k_false = 0;
    long kfwer = 0;
    long partial = 0;
    long any = 0;
    long false_sum = 0;
    long false_sq = 0;

    void add(const Tally& o) {
        at_least_k += o.at_least_k;
        at_least_k_false += o.at_least_k_false;
        kfwer += o.kfwer;
        partial += o.partial;
        any += o.any;
        false_sum += o.false_sum;
        false_sq += o.false_sq;
    }
};

MetricRow proportion_row(long hits, long reps) {
    MetricRow row;
    const double p = static_cast<double>(hits) / reps;
    row.estimate = p;
    row.std_error = std::sqrt(p * (1.0 - p) / reps);
    return row;
}

}  // namespace

std::string_view metric_name(Metric m) {
    for (const auto& [id, name] : kMetricNames) {
        if (id == m) return name;
    }
    return "unknown";
}

Metric parse_metric(std::string_view text) {
    for (const auto& [id, name] : kMetricNames) {
        if (name == text) return id;
    }
    throw ConfigError("unknown metric '" + std::string(text) + "'");
}

const std::vector<Metric>& all_metrics() {
    static const std::vector<Metric> v = [] {
        std::vector<Metric> out;
        for (const auto& [id, name] : kMetricNames) out.push_back(id);
        return out;
    }();
    return v;
}

void ExperimentConfig::validate() const {
    if (n < 1) throw ConfigError(name + ": n must be at least 1");
    if (k < 1 || k > n) throw ConfigError(name + ": k must lie in [1, n]");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError(name + ": alpha must lie in (0,1)");
    if (reps < 1000) throw ConfigError(name + ": reps must be at least 1000");
    if (procedures.empty()) throw ConfigError(name + ": no procedures given");
    if (metrics.empty()) throw ConfigError(name + ": no metrics given");
    if (!mu.empty()) {
        if (static_cast<int>(mu.size()) != n) throw ConfigError(name + ": mu must have n entries");
        for (double m : mu) {
            if (!std::isfinite(m)) throw ConfigError(name + ": mu entries must be finite");
        }
    } else {
        if (n1 < 0 || n1 > n) throw ConfigError(name + ": n1 must lie in [0, n]");
        if (!std::isfinite(effect)) throw ConfigError(name + ": effect must be finite");
    }
    if (model.kind() == ModelKind::empirical) throw ConfigError(name + ": an empirical model cannot generate data");
    if (model.kind() == ModelKind::factor_normal && static_cast<int>(model.loadings().size()) != n) {
        throw ConfigError(name + ": factor loadings must have n entries");
    }
    const NullModel& cm = crit_model();
    if (cm.kind() == ModelKind::factor_normal && static_cast<int>(cm.loadings().size()) != n) {
        throw ConfigError(name + ": critical-value factor loadings must have n entries");
    }
}

std::vector<double> ExperimentConfig::means() const {
    if (!mu.empty()) return mu;
    std::vector<double> m(n, 0.0);
    if (placement == Placement::first) std::fill(m.begin(), m.begin() + n1, effect);
    else std::fill(m.end() - n1, m.end(), effect);
    return m;
}

std::vector<char> ExperimentConfig::false_nulls() const {
    const auto m = means();
    std::vector<char> f(n);
    for (int i = 0; i < n; ++i) f[i] = m[i] != 0.0;
    return f;
}

const MetricRow* MetricsReport::find(ProcedureId procedure, Metric metric) const {
    for (const auto& r : rows) {
        if (r.procedure == procedure && r.metric == metric) return &r;
    }
    return nullptr;
}

MetricsReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const int n = cfg.n;
    const int k = cfg.k;
    const auto is_false = cfg.false_nulls();
    const int n1 = static_cast<int>(std::count(is_false.begin(), is_false.end(), 1));

    std::vector<CriticalValueSet> sets;
    std::vector<ApplyRule> rules;
    for (ProcedureId id : cfg.procedures) {
        sets.push_back(make_critvals(id, n, k, cfg.alpha, cfg.crit_model()));
        rules.push_back(apply_rule(id));
    }
    const std::size_t procs = sets.size();

    const PValueSampler sampler(cfg.model, n, cfg.means());
    const std::int64_t chunks = (cfg.reps + kChunk - 1) / kChunk;
    std::vector<std::vector<Tally>> per_chunk(chunks, std::vector<Tally>(procs));

    parallel_chunks(cfg.reps, kChunk, [&](std::int64_t chunk, std::int64_t begin, std::int64_t end) {
        std::vector<double> p(n);
        std::vector<int> order(n);
        std::vector<double> sorted(n);
        std::vector<int> false_prefix(n + 1);
        auto& tallies = per_chunk[chunk];
        for (std::int64_t r = begin; r < end; ++r) {
            sampler.draw(cfg.seed, static_cast<std::uint64_t>(r), {}, p);
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](int a, int b) { return p[a] < p[b] || (p[a] == p[b] && a < b); });
            false_prefix[0] = 0;
            for (int i = 0; i < n; ++i) {
                sorted[i] = p[order[i]];
                false_prefix[i + 1] = false_prefix[i] + is_false[order[i]];
            }
            for (std::size_t j = 0; j < procs; ++j) {
                const int rejected = rejection_count(rules[j], sorted, sets[j]);
                const int false_rej = false_prefix[rejected];
                const int true_rej = rejected - false_rej;
                Tally& t = tallies[j];
                t.at_least_k += rejected >= k;
                t.at_least_k_false += false_rej >= k;
                t.kfwer += true_rej >= k;
                t.partial += true_rej >= 1 && true_rej < k;
                t.any += rejected >= 1;
                t.false_sum += false_rej;
                t.false_sq += static_cast<long>(false_rej) * false_rej;
            }
        }
    });

    std::vector<Tally> totals(procs);
    for (const auto& c : per_chunk) {
        for (std::size_t j = 0; j < procs; ++j) totals[j].add(c[j]);
    }

    MetricsReport report;
    report.study = cfg.name;
    report.config = cfg;
    const long reps = cfg.reps;
    for (std::size_t j = 0; j < procs; ++j) {
        const Tally& t = totals[j];
        for (Metric m : cfg.metrics) {
            MetricRow row;
            switch (m) {
                case Metric::power_at_least_k: row = proportion_row(t.at_least_k, reps); break;
                case Metric::power_at_least_k_false: row = proportion_row(t.at_least_k_false, reps); break;
                case Metric::kfwer: row = proportion_row(t.kfwer, reps); break;
                case Metric::partial_rejections: row = proportion_row(t.partial, reps); break;
                case Metric::global_reject_rate: row = proportion_row(t.any, reps); break;
                case Metric::ave_power:
                    if (n1 > 0) {
                        const double mean = static_cast<double>(t.false_sum) / reps;
                        const double var =
                            std::max(0.0, (static_cast<double>(t.false_sq) - reps * mean * mean) / (reps - 1.0));
                        row.estimate = mean / n1;
                        row.std_error = std::sqrt(var / reps) / n1;
                    }
                    break;
            }
            row.study = cfg.name;
            row.procedure = cfg.procedures[j];
            row.metric = m;
            row.reps = reps;
            row.seed = cfg.seed;
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

std::vector<MetricsReport> run_study(const std::vector<ExperimentConfig>& configs) {
    std::vector<MetricsReport> out;
    out.reserve(configs.size());
    for (const auto& cfg : configs) {
        try {
            out.push_back(run_experiment(cfg));
        } catch (const NumericalError& e) {
            MetricsReport r;
            r.study = cfg.name;
            r.config = cfg;
            r.error = e.what();
            r.numerical_failure = true;
            out.push_back(std::move(r));
        } catch (const std::exception& e) {
            MetricsReport r;
            r.study = cfg.name;
            r.config = cfg;
            r.error = e.what();
            out.push_back(std::move(r));
        }
    }
    return out;
}

}  // namespace kfwer
