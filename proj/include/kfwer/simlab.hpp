#pragma once

// Seeded Monte Carlo studies: draw p-values from a dependence model, apply a set
// of procedures to the same draw, and accumulate error rates and powers.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kfwer/crit_values.hpp"
#include "kfwer/null_models.hpp"

namespace kfwer {

enum class Metric {
    power_at_least_k,        // at least k rejections in total
    power_at_least_k_false,  // at least k false nulls rejected
    ave_power,               // mean fraction of false nulls rejected (undefined when n1 = 0)
    kfwer,                   // at least k true nulls rejected
    partial_rejections,      // between 1 and k-1 true nulls rejected
    global_reject_rate,      // at least one rejection
};

std::string_view metric_name(Metric m);
Metric parse_metric(std::string_view text);
const std::vector<Metric>& all_metrics();

// Which coordinates carry the effect when the means are given as (n1, effect).
enum class Placement { first, last };

struct ExperimentConfig {
    std::string name = "experiment";
    int n = 10;
    int k = 1;
    double alpha = 0.05;
    NullModel model = NullModel::independent();  // data-generating model
    std::optional<NullModel> critical_model;      // model for critical values; defaults to `model`
    std::vector<double> mu;                       // explicit means; overrides n1/effect when non-empty
    int n1 = 0;
    double effect = 2.0;
    Placement placement = Placement::first;
    std::vector<ProcedureId> procedures;
    long reps = 20'000;
    std::uint64_t seed = 1;
    std::vector<Metric> metrics;

    // ConfigError on any violated constraint.
    void validate() const;
    // Length-n mean vector.
    std::vector<double> means() const;
    // Indicator of a false null per coordinate (mean != 0).
    std::vector<char> false_nulls() const;
    const NullModel& crit_model() const { return critical_model ? *critical_model : model; }
};

struct MetricRow {
    std::string study;
    ProcedureId procedure = ProcedureId::gen_simes;
    Metric metric = Metric::power_at_least_k;
    std::optional<double> estimate;  // empty when undefined
    std::optional<double> std_error;
    long reps = 0;
    std::uint64_t seed = 0;
};

struct MetricsReport {
    std::string study;
    ExperimentConfig config;
    std::vector<MetricRow> rows;
    std::string error;  // set when the config failed; rows are then empty
    bool numerical_failure = false;

    bool ok() const { return error.empty(); }
    // nullptr when absent.
    const MetricRow* find(ProcedureId procedure, Metric metric) const;
};

MetricsReport run_experiment(const ExperimentConfig& cfg);

// Runs every config in order. A failing config yields a report with `error`
// set; the others are unaffected.
std::vector<MetricsReport> run_study(const std::vector<ExperimentConfig>& configs);

}  // namespace kfwer
