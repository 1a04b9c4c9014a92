#pragma once

// Decision rules: generalized step-up, step-down, single-step and the global
// generalized Simes test. Every rule rejects the r smallest p-values for some r.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kfwer/crit_values.hpp"

namespace kfwer {

struct PValueEntry {
    std::string id;
    double p = 0.0;
};

struct Decision {
    std::string id;
    double p = 0.0;
    int rank = 0;                 // 1-based position in ascending p order
    double critical_value = 0.0;  // c_rank
    bool rejected = false;
};

struct DecisionReport {
    ProcedureId procedure = ProcedureId::gen_simes;
    int n = 0;
    int k = 1;
    double alpha = 0.0;
    std::string model;
    std::vector<Decision> rows;  // sorted by rank
    int num_rejected = 0;
    std::optional<int> cutoff;   // i0; none when nothing passes
};

// Non-empty, ids unique, every p in [0,1]. ConfigError otherwise.
void validate_pvalues(std::span<const PValueEntry> p);

// Ascending p, ties ordered by id.
std::vector<PValueEntry> sorted_by_p(std::span<const PValueEntry> p);

DecisionReport stepup_apply(std::span<const PValueEntry> p, const CriticalValueSet& c);
DecisionReport stepdown_apply(std::span<const PValueEntry> p, const CriticalValueSet& c);
DecisionReport single_step_apply(std::span<const PValueEntry> p, const CriticalValueSet& c);

// Uses apply_rule(c.procedure).
DecisionReport apply_procedure(std::span<const PValueEntry> p, const CriticalValueSet& c);

// True iff some P_(i) <= c_i; c must be a gen_simes set.
bool global_simes_test(std::span<const PValueEntry> p, const CriticalValueSet& c);

// Hot-path forms on sorted p-values (ascending) and padded constants of the
// same length. Each returns the number of smallest p-values rejected.
int stepup_count(std::span<const double> sorted_p, std::span<const double> padded);
int stepdown_count(std::span<const double> sorted_p, std::span<const double> padded);
int single_step_count(std::span<const double> sorted_p, double threshold);
int rejection_count(ApplyRule rule, std::span<const double> sorted_p, const CriticalValueSet& c);

}  // namespace kfwer
