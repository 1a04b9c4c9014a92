#include "kfwer/studies.hpp"

#include <cmath>
#include <cstdio>

namespace kfwer {

namespace {

std::string num_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

NullModel equicorr(double rho) { return rho == 0.0 ? NullModel::independent() : NullModel::equicorrelated_normal(rho); }

std::vector<ExperimentConfig> fig1() {
    std::vector<ExperimentConfig> out;
    for (double rho : {0.0, 0.25, 0.5, 0.75}) {
        for (int k : {2, 3}) {
            for (int n1 = 0; n1 <= 10; ++n1) {
                ExperimentConfig c;
                c.name = "fig1-rho" + num_label(rho) + "-k" + std::to_string(k) + "-n1-" + std::to_string(n1);
                c.n = 10;
                c.k = k;
                c.model = equicorr(rho);
                c.n1 = n1;
                c.procedures = {ProcedureId::gen_simes, ProcedureId::classic_simes};
                c.metrics = {Metric::power_at_least_k, Metric::power_at_least_k_false, Metric::global_reject_rate};
                c.reps = 50'000;
                c.seed = 101;
                out.push_back(std::move(c));
            }
        }
    }
    return out;
}

std::vector<ExperimentConfig> fig2() {
    std::vector<ExperimentConfig> out;
    for (double rho : {0.0, 0.1, 0.25, 0.5, 0.75}) {
        for (int k : {2, 3}) {
            for (int n1 = 0; n1 <= 100; n1 += 10) {
                ExperimentConfig c;
                c.name = "fig2-rho" + num_label(rho) + "-k" + std::to_string(k) + "-n1-" + std::to_string(n1);
                c.n = 100;
                c.k = k;
                c.model = equicorr(rho);
                c.n1 = n1;
                c.procedures = {ProcedureId::gen_hochberg_stepup, ProcedureId::lr_stepup,
                                ProcedureId::classic_hochberg};
                c.metrics = {Metric::ave_power, Metric::kfwer};
                c.reps = 20'000;
                c.seed = 202;
                out.push_back(std::move(c));
            }
        }
    }
    return out;
}

std::vector<ExperimentConfig> fig3() {
    std::vector<ExperimentConfig> out;
    const int n = 20;
    for (int n1 = 0; n1 <= n; n1 += 2) {
        ExperimentConfig c;
        c.name = "fig3-n1-" + std::to_string(n1);
        c.n = n;
        c.k = 2;
        c.model = NullModel::factor_normal(two_block_loadings(n));
        // False nulls sit on the last n1 coordinates, inside the high-loading block first.
        c.mu.assign(n, 0.0);
        for (int i = n - n1; i < n; ++i) c.mu[i] = 2.0;
        c.procedures = {ProcedureId::gen_simes, ProcedureId::classic_simes};
        c.metrics = {Metric::power_at_least_k, Metric::power_at_least_k_false, Metric::global_reject_rate};
        c.reps = 20'000;
        c.seed = 303;
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<ExperimentConfig> fig4() {
    std::vector<ExperimentConfig> out;
    for (int dof : {3, 5, 10, 30}) {
        const NullModel t = NullModel::equicorrelated_t(0.25, dof);
        for (const char* crit : {"tcrit", "ncrit"}) {
            for (int n1 = 0; n1 <= 10; n1 += 2) {
                ExperimentConfig c;
                c.name = "fig4-dof" + std::to_string(dof) + "-" + crit + "-n1-" + std::to_string(n1);
                c.n = 10;
                c.k = 2;
                c.model = t;
                if (std::string_view(crit) == "ncrit") c.critical_model = NullModel::equicorrelated_normal(0.25);
                c.n1 = n1;
                c.procedures = {ProcedureId::gen_simes, ProcedureId::classic_simes};
                c.metrics = {Metric::power_at_least_k, Metric::kfwer};
                c.reps = 20'000;
                c.seed = 404;
                out.push_back(std::move(c));
            }
        }
    }
    return out;
}

std::vector<ExperimentConfig> fig5() {
    std::vector<ExperimentConfig> out;
    for (int k : {10, 25, 50}) {
        for (int n1 : {100, 250, 500, 750}) {
            ExperimentConfig c;
            c.name = "fig5-k" + std::to_string(k) + "-n1-" + std::to_string(n1);
            c.n = 1000;
            c.k = k;
            c.n1 = n1;
            c.procedures = {ProcedureId::gen_hochberg_stepup, ProcedureId::lr_stepup};
            c.metrics = {Metric::ave_power, Metric::kfwer};
            c.reps = 20'000;
            c.seed = 505;
            out.push_back(std::move(c));
        }
    }
    return out;
}

std::vector<ExperimentConfig> table2() {
    std::vector<ExperimentConfig> out;
    for (int n : {10, 20}) {
        for (int k : {2, 3}) {
            for (double rho : {0.0, 0.25, 0.5, 0.75}) {
                ExperimentConfig c;
                c.name = "table2-n" + std::to_string(n) + "-k" + std::to_string(k) + "-rho" + num_label(rho);
                c.n = n;
                c.k = k;
                c.model = equicorr(rho);
                c.procedures = {ProcedureId::gen_simes};
                c.metrics = {Metric::partial_rejections};
                c.reps = 50'000;
                c.seed = 2;
                out.push_back(std::move(c));
            }
        }
    }
    return out;
}

std::vector<ExperimentConfig> family(std::string_view name) {
    if (name == "fig1") return fig1();
    if (name == "fig2") return fig2();
    if (name == "fig3") return fig3();
    if (name == "fig4") return fig4();
    if (name == "fig5") return fig5();
    if (name == "table2") return table2();
    return {};
}

}  // namespace

const std::vector<std::string>& canned_study_families() {
    static const std::vector<std::string> names = {"fig1", "fig2", "fig3", "fig4", "fig5", "table2"};
    return names;
}

std::vector<double> two_block_loadings(int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = std::sqrt(i < n / 2 ? 0.25 : 0.75);
    return v;
}

std::vector<ExperimentConfig> canned_study(std::string_view name, long reps_override) {
    const std::string_view fam = name.substr(0, name.find('-'));
    std::vector<ExperimentConfig> out;
    for (auto& c : family(fam)) {
        const std::string_view cname = c.name;
        const bool match = cname == name || (cname.size() > name.size() && cname.substr(0, name.size()) == name &&
                                             cname[name.size()] == '-');
        if (!match) continue;
        if (reps_override > 0) c.reps = reps_override;
        out.push_back(std::move(c));
    }
    if (out.empty()) throw ConfigError("unknown study '" + std::string(name) + "'");
    return out;
}

}  // namespace kfwer
