#pragma once

// Canned study grids. A name selects a whole family ("fig1") or any prefix of
// its member names ("fig1-rho0-k2").

#include <string>
#include <string_view>
#include <vector>

#include "kfwer/simlab.hpp"

namespace kfwer {

// Family names: fig1, fig2, fig3, fig4, fig5, table2.
const std::vector<std::string>& canned_study_families();

// Configs whose name equals `name` or starts with `name` followed by '-'.
// reps_override > 0 replaces the default replication count.
// ConfigError when nothing matches.
std::vector<ExperimentConfig> canned_study(std::string_view name, long reps_override = 0);

// Loadings for the two-block factor study: sqrt(0.25) for the first half, sqrt(0.75) after.
std::vector<double> two_block_loadings(int n);

}  // namespace kfwer
