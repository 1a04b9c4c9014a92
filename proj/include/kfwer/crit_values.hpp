#pragma once

// Critical-value sets alpha_k <= ... <= alpha_n for the generalized and classic
// stepwise procedures, with the padding c_i = alpha_{max(i,k)}.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kfwer/null_models.hpp"

namespace kfwer {

enum class ProcedureId {
    gen_simes,
    gen_hochberg_stepup,
    gen_holm_stepdown,
    gen_single_step,
    lr_stepdown,
    lr_stepup,
    romano_stepdown,
    classic_simes,
    classic_holm,
    classic_hochberg,
};

enum class ApplyRule { step_up, step_down, single_step };

// Canonical dashed name, e.g. "gen-hochberg-stepup".
std::string_view procedure_name(ProcedureId id);

// Accepts canonical names, underscores for dashes, and the short aliases
// gen-hochberg, gen-holm, simes, holm, hochberg. ConfigError if unknown.
ProcedureId parse_procedure(std::string_view text);

const std::vector<ProcedureId>& all_procedures();

ApplyRule apply_rule(ProcedureId id);

// True for procedures whose constants depend on the null model.
bool uses_null_model(ProcedureId id);

bool is_classic(ProcedureId id);

struct CriticalValueSet {
    ProcedureId procedure = ProcedureId::gen_simes;
    int n = 0;
    int k = 1;
    double alpha = 0.0;
    std::string model;            // NullModel::describe() of the model used
    std::vector<double> values;   // alpha_k..alpha_n; values[i - k]
    std::vector<double> padded;   // c_1..c_n; padded[i - 1] = alpha_{max(i,k)}

    // 1-based accessors.
    double alpha_at(int i) const { return values.at(i - k); }
    double padded_at(int i) const { return padded.at(i - 1); }
};

// How the generalized sets are solved. `automatic` uses the closed forms under
// independence; `inversion` always runs the root finder on G_k.
enum class Solver { automatic, inversion };

CriticalValueSet gen_simes_critvals(int n, int k, double alpha, const NullModel& model,
                                    Solver solver = Solver::automatic);
CriticalValueSet gen_simes_critvals_closed_form(int n, int k, double alpha);

// Constants with G_k(alpha_i) = alpha / C(n+k-i, k). `as` selects the label
// (gen_hochberg_stepup, gen_holm_stepdown or gen_single_step); values are identical.
CriticalValueSet gen_hochberg_critvals(int n, int k, double alpha, const NullModel& model,
                                       Solver solver = Solver::automatic,
                                       ProcedureId as = ProcedureId::gen_hochberg_stepup);
CriticalValueSet gen_hochberg_critvals_closed_form(int n, int k, double alpha,
                                                   ProcedureId as = ProcedureId::gen_hochberg_stepup);

// k * alpha / (n - i + k). `as` is lr_stepdown or lr_stepup.
CriticalValueSet lr_critvals(int n, int k, double alpha, ProcedureId as = ProcedureId::lr_stepdown);

// Root of sum_{j>=k} C(m,j) u^j (1-u)^(m-j) = alpha with m = n - i + k. Independence only.
CriticalValueSet romano_critvals(int n, int k, double alpha);

// classic_simes: i*alpha/n; classic_holm / classic_hochberg: alpha/(n-i+1). Always k = 1.
CriticalValueSet classic_critvals(ProcedureId procedure, int n, double alpha);

// Dispatches on `procedure`, caching per (procedure, n, k, alpha, model).
// Classic procedures ignore k and the model; LR and Romano ignore the model.
CriticalValueSet make_critvals(ProcedureId procedure, int n, int k, double alpha, const NullModel& model);

void clear_critval_cache();
std::size_t critval_cache_size();

}  // namespace kfwer
