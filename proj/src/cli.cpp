#include "kfwer/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "kfwer/crit_values.hpp"
#include "kfwer/io.hpp"
#include "kfwer/procedures.hpp"
#include "kfwer/simlab.hpp"
#include "kfwer/studies.hpp"
#include "kfwer/verify.hpp"

namespace kfwer {

namespace {

// Sends text to --out FILE when given, else to `out`.
void emit(const std::string& path, std::ostream& out, const std::string& text) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write '" + path + "'");
    f << text;
    if (!f) throw ConfigError("write to '" + path + "' failed");
}

struct CommonModelOpts {
    std::string model = "independent";
    double quad_tol = 0.0;
    int quad_refinements = 0;

    void add(CLI::App* cmd) {
        cmd->add_option("--model", model, "independent | equicorr:RHO | factor:FILE | t:RHO:DOF:SAMPLES:SEED")
            ->capture_default_str();
        cmd->add_option("--quad-tol", quad_tol, "Override the G_k quadrature tolerance (absolute and relative)")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--quad-refinements", quad_refinements, "Override the number of node doublings (4..10)");
    }

    void apply() const {
        if (quad_tol <= 0.0 && quad_refinements == 0) return;
        AccuracySpec acc = gk_quadrature_accuracy();
        if (quad_tol > 0.0) acc.abs_tol = acc.rel_tol = quad_tol;
        if (quad_refinements != 0) acc.max_refinements = quad_refinements;
        set_gk_quadrature_accuracy(acc);
        clear_critval_cache();
    }
};

// Restores the default quadrature accuracy when a command finishes.
struct AccuracyGuard {
    AccuracySpec saved = gk_quadrature_accuracy();
    ~AccuracyGuard() {
        set_gk_quadrature_accuracy(saved);
        clear_critval_cache();
    }
};

std::string verify_table(const std::vector<CheckResult>& checks) {
    std::size_t w_name = 5;
    std::size_t w_est = 8;
    std::size_t w_ref = 9;
    std::size_t w_tol = 9;
    for (const auto& c : checks) {
        w_name = std::max(w_name, c.suite.size() + 1 + c.name.size());
        w_est = std::max(w_est, c.estimate.size());
        w_ref = std::max(w_ref, c.reference.size());
        w_tol = std::max(w_tol, c.tolerance.size());
    }
    std::ostringstream os;
    os << std::left << std::setw(w_name) << "check" << "  " << std::setw(w_est) << "estimate" << "  "
       << std::setw(w_ref) << "reference" << "  " << std::setw(w_tol) << "tolerance" << "  verdict\n";
    int passed = 0;
    for (const auto& c : checks) {
        os << std::setw(w_name) << (c.suite + "/" + c.name) << "  " << std::setw(w_est) << c.estimate << "  "
           << std::setw(w_ref) << c.reference << "  " << std::setw(w_tol) << c.tolerance << "  "
           << (c.pass ? "PASS" : "FAIL") << '\n';
        passed += c.pass;
    }
    os << "# " << passed << "/" << checks.size() << " checks passed\n";
    return os.str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"k-FWER multiple testing toolkit: critical values, decisions, simulation and verification", "kfwer"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    // critvals
    auto* critvals = app.add_subcommand("critvals", "Emit a critical-value table as CSV");
    std::string cv_proc;
    int cv_n = 0;
    int cv_k = 1;
    double cv_alpha = 0.05;
    std::string cv_out;
    CommonModelOpts cv_model;
    critvals->add_option("--procedure", cv_proc, "Procedure id, e.g. gen-simes")->required();
    critvals->add_option("--n", cv_n, "Number of hypotheses")->required();
    critvals->add_option("--k", cv_k, "k of the k-FWER")->capture_default_str();
    critvals->add_option("--alpha", cv_alpha, "Level")->capture_default_str();
    critvals->add_option("--out", cv_out, "Write to FILE instead of standard output");
    cv_model.add(critvals);

    // apply
    auto* apply = app.add_subcommand("apply", "Apply a procedure to a CSV of p-values (header id,p)");
    std::string ap_proc;
    std::string ap_pvalues;
    int ap_k = 1;
    double ap_alpha = 0.05;
    std::string ap_out;
    CommonModelOpts ap_model;
    apply->add_option("--procedure", ap_proc, "Procedure id")->required();
    apply->add_option("--pvalues", ap_pvalues, "CSV file with header id,p")->required();
    apply->add_option("--k", ap_k, "k of the k-FWER")->capture_default_str();
    apply->add_option("--alpha", ap_alpha, "Level")->capture_default_str();
    apply->add_option("--out", ap_out, "Write to FILE instead of standard output");
    ap_model.add(apply);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Run a JSON-configured or canned Monte Carlo study");
    std::string sim_config;
    std::string sim_study;
    long sim_reps = 0;
    std::string sim_out;
    simulate->add_option("--config", sim_config, "JSON config file");
    simulate->add_option("--study", sim_study, "Canned study: fig1..fig5, table2, or a member prefix");
    simulate->add_option("--reps", sim_reps, "Override the replication count (>= 1000)");
    simulate->add_option("--out", sim_out, "Write to FILE instead of standard output");

    // verify
    auto* verify = app.add_subcommand("verify", "Run a verification suite and print a pass/fail table");
    std::string vf_suite;
    std::uint64_t vf_seed = 1;
    std::string vf_out;
    verify->add_option("--suite", vf_suite, "table1 | table2 | lemma21 | exactness | dominance | monotonicity | all")
        ->required();
    verify->add_option("--seed", vf_seed, "Master seed for Monte Carlo checks")->capture_default_str();
    verify->add_option("--out", vf_out, "Write to FILE instead of standard output");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        AccuracyGuard guard;
        if (*critvals) {
            cv_model.apply();
            const ProcedureId id = parse_procedure(cv_proc);
            const NullModel model = io::parse_model_spec(cv_model.model);
            if (cv_n < 1) throw ConfigError("--n must be at least 1");
            if (!is_classic(id) && cv_n < cv_k) {
                throw ConfigError("n < k: --n " + std::to_string(cv_n) + " is smaller than --k " + std::to_string(cv_k));
            }
            const auto set = make_critvals(id, cv_n, cv_k, cv_alpha, model);
            std::ostringstream os;
            io::write_critvals_csv(os, set);
            emit(cv_out, out, os.str());
            return kExitOk;
        }
        if (*apply) {
            ap_model.apply();
            const ProcedureId id = parse_procedure(ap_proc);
            const NullModel model = io::parse_model_spec(ap_model.model);
            const auto pvalues = io::read_pvalues_file(ap_pvalues);
            const int n = static_cast<int>(pvalues.size());
            if (!is_classic(id) && n < ap_k) {
                throw ConfigError("n < k: " + std::to_string(n) + " p-values but --k " + std::to_string(ap_k));
            }
            const auto set = make_critvals(id, n, ap_k, ap_alpha, model);
            const auto report = apply_procedure(pvalues, set);
            std::ostringstream os;
            io::write_decision_csv(os, report);
            emit(ap_out, out, os.str());
            return kExitOk;
        }
        if (*simulate) {
            if (sim_config.empty() == sim_study.empty()) {
                throw ConfigError("simulate needs exactly one of --config or --study");
            }
            if (sim_reps != 0 && sim_reps < 1000) throw ConfigError("--reps must be at least 1000");
            std::vector<ExperimentConfig> configs;
            if (!sim_config.empty()) {
                configs = io::read_experiment_file(sim_config);
                if (sim_reps > 0) {
                    for (auto& c : configs) c.reps = sim_reps;
                }
            } else {
                configs = canned_study(sim_study, sim_reps);
            }
            const auto reports = run_study(configs);
            std::ostringstream os;
            io::write_metrics_csv(os, reports);
            emit(sim_out, out, os.str());
            int failed = 0;
            bool numerical = false;
            for (const auto& r : reports) {
                if (!r.ok()) {
                    ++failed;
                    numerical = numerical || r.numerical_failure;
                    err << "study " << r.study << " failed: " << r.error << '\n';
                }
            }
            if (failed == static_cast<int>(reports.size())) return numerical ? kExitNumerical : kExitUsage;
            return kExitOk;
        }
        if (*verify) {
            const auto checks = run_verify_suite(vf_suite, vf_seed);
            emit(vf_out, out, verify_table(checks));
            const bool all = std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
            return all ? kExitOk : kExitVerifyFailed;
        }
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ScaleError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace kfwer
