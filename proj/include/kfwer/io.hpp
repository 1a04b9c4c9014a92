#pragma once

// Text formats: model specs, loadings files, p-value CSV input, CSV output for
// critical values, decisions and metrics, and JSON experiment configs.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "kfwer/procedures.hpp"
#include "kfwer/simlab.hpp"

namespace kfwer::io {

// 10 significant digits, shortest form.
std::string format_real(double v);

// independent | equicorr:RHO | factor:FILE | t:RHO:DOF:SAMPLES:SEED
NullModel parse_model_spec(std::string_view spec);

// One loading per line; blank lines and '#' comments skipped.
std::vector<double> read_loadings(std::istream& in, const std::string& source);
std::vector<double> read_loadings_file(const std::filesystem::path& path);

// Header `id,p`; ids match [A-Za-z0-9_-]+. Errors name the offending line.
std::vector<PValueEntry> read_pvalues(std::istream& in, const std::string& source);
std::vector<PValueEntry> read_pvalues_file(const std::filesystem::path& path);

void write_critvals_csv(std::ostream& out, const CriticalValueSet& set);
void write_decision_csv(std::ostream& out, const DecisionReport& report);

// Header once, then one row per (procedure, metric). Failed configs are
// emitted as a comment line `# error study=...: message`.
void write_metrics_csv(std::ostream& out, const std::vector<MetricsReport>& reports);

// A single config object or {"configs": [ ... ]}. ConfigError on schema violations.
std::vector<ExperimentConfig> parse_experiment_json(std::string_view text, const std::filesystem::path& base_dir = {});
std::vector<ExperimentConfig> read_experiment_file(const std::filesystem::path& path);

}  // namespace kfwer::io
