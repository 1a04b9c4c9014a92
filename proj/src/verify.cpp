#include "kfwer/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

#include "kfwer/crit_values.hpp"
#include "kfwer/io.hpp"
#include "kfwer/prob_bounds.hpp"
#include "kfwer/procedures.hpp"
#include "kfwer/rng.hpp"
#include "kfwer/sampling.hpp"
#include "kfwer/simlab.hpp"
#include "kfwer/studies.hpp"

namespace kfwer {

namespace {

constexpr double kRhos[] = {0.0, 0.25, 0.5, 0.75};

// [rho index][k - 2]
const std::vector<double> kTable1[4][2] = {
    {{.0333, .0577, .0816, .1054, .1291, .1527, .1764, .2000, .2236},
     {.0747, .1186, .1609, .2027, .2443, .2857, .3271, .3684}},
    {{.0177, .0345, .0525, .0716, .0914, .1120, .1331, .1548, .1769},
     {.0297, .0573, .0882, .1220, .1581, .1965, .2367, .2784}},
    {{.0090, .0198, .0325, .0468, .0625, .0793, .0972, .1160, .1357},
     {.0108, .0257, .0449, .0686, .0961, .1273, .1619, .1998}},
    {{.0041, .0104, .0186, .0284, .0397, .0525, .0665, .0817, .0980},
     {.0033, .0098, .0200, .0340, .0519, .0739, .1000, .1303}},
};

// [n index][k - 2][rho index]
constexpr double kTable2[2][2][4] = {
    {{.2384, .1003, .0337, .0054}, {.4905, .1833, .0458, .0042}},
    {{.2273, .0783, .0200, .0012}, {.4619, .1180, .0182, .0003}},
};

int rho_index(double rho) {
    for (int i = 0; i < 4; ++i) {
        if (std::abs(kRhos[i] - rho) < 1e-12) return i;
    }
    throw ConfigError("no reference values for rho=" + io::format_real(rho));
}

std::string fmt(double v, const char* f = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

NullModel equicorr(double rho) { return rho == 0.0 ? NullModel::independent() : NullModel::equicorrelated_normal(rho); }

class Collector {
public:
    explicit Collector(std::string suite) : suite_(std::move(suite)) {}

    void abs_check(const std::string& name, double est, double ref, double tol) {
        add(name, fmt(est, "%.10g"), fmt(ref), "±" + fmt(tol), std::abs(est - ref) <= tol);
    }
    void add(const std::string& name, std::string est, std::string ref, std::string tol, bool pass) {
        out_.push_back({suite_, name, std::move(est), std::move(ref), std::move(tol), pass});
    }
    std::vector<CheckResult> take() { return std::move(out_); }

private:
    std::string suite_;
    std::vector<CheckResult> out_;
};

std::vector<CheckResult> suite_table1() {
    Collector c("table1");
    for (double rho : kRhos) {
        for (int k = 1; k <= 3; ++k) {
            const auto set = gen_simes_critvals(10, k, 0.05, equicorr(rho));
            const auto ref = reference_table1(rho, k);
            for (int i = k; i <= 10; ++i) {
                c.abs_check("rho=" + fmt(rho) + " k=" + std::to_string(k) + " alpha_" + std::to_string(i),
                            set.alpha_at(i), ref[i - k], 5e-4);
            }
        }
    }
    return c.take();
}

std::vector<CheckResult> suite_table2(std::uint64_t seed) {
    Collector c("table2");
    auto configs = canned_study("table2");
    for (auto& cfg : configs) cfg.seed = seed;
    for (const auto& rep : run_study(configs)) {
        const auto& cfg = rep.config;
        const double ref = reference_table2(cfg.n, cfg.k, cfg.model.kind() == ModelKind::independent ? 0.0 : cfg.model.rho());
        if (!rep.ok()) {
            c.add(rep.study, "error", fmt(ref), "", false);
            continue;
        }
        const double est = *rep.find(ProcedureId::gen_simes, Metric::partial_rejections)->estimate;
        c.abs_check(rep.study, est, ref, 4.0 * std::sqrt(ref * (1.0 - ref) / cfg.reps));
    }
    return c.take();
}

std::vector<CheckResult> suite_lemma21(std::uint64_t seed) {
    Collector c("lemma21");
    const long reps = 200'000;
    for (double rho : {0.0, 0.25, 0.5}) {
        for (auto [n, k] : {std::pair{4, 2}, std::pair{5, 2}, std::pair{5, 3}}) {
            const NullModel model = equicorr(rho);
            const auto set = gen_simes_critvals(n, k, 0.05, model);
            const CriticalVector cv(n, k, set.values);
            const PValueSampler sampler(model, n);
            const auto lhs = union_prob_mc(sampler, cv, reps, seed);
            const auto rhs = lemma21_rhs_mc(sampler, cv, reps, seed + 1);
            const double se = std::hypot(lhs.std_error, rhs.std_error);
            c.add("rho=" + fmt(rho) + " n=" + std::to_string(n) + " k=" + std::to_string(k),
                  fmt(lhs.value) + " vs " + fmt(rhs.value), "difference 0", "±" + fmt(4.0 * se),
                  std::abs(lhs.value - rhs.value) <= 4.0 * se);
        }
    }
    return c.take();
}

std::vector<CheckResult> suite_exactness(std::uint64_t seed) {
    Collector c("exactness");
    for (int n = 2; n <= 4; ++n) {
        for (int k = 1; k <= n; ++k) {
            const auto set = gen_simes_critvals_closed_form(n, k, 0.05);
            const auto exact = union_prob_exact_smalln(CriticalVector(n, k, set.values));
            c.abs_check("exact n=" + std::to_string(n) + " k=" + std::to_string(k), exact.value, 0.05, 1e-8);
        }
    }
    for (int k : {2, 3}) {
        ExperimentConfig cfg;
        cfg.name = "exactness-mc";
        cfg.n = 10;
        cfg.k = k;
        cfg.procedures = {ProcedureId::gen_simes};
        cfg.metrics = {Metric::kfwer};
        cfg.reps = 200'000;
        cfg.seed = seed;
        const auto rep = run_experiment(cfg);
        const auto* row = rep.find(ProcedureId::gen_simes, Metric::kfwer);
        c.abs_check("mc n=10 k=" + std::to_string(k), *row->estimate, 0.05, 4.0 * std::sqrt(0.05 * 0.95 / cfg.reps));
    }
    return c.take();
}

bool all_geq(const std::vector<double>& a, const std::vector<double>& b, double slack = 1e-12) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < b[i] - slack) return false;
    }
    return true;
}

std::vector<CheckResult> suite_dominance(std::uint64_t seed) {
    Collector c("dominance");
    for (double alpha : {0.05, 0.1}) {
        for (int n : {5, 10, 20, 100}) {
            for (int k : {2, 3, 5}) {
                if (k > n) continue;
                const std::string tag = "n=" + std::to_string(n) + " k=" + std::to_string(k) + " alpha=" + fmt(alpha);
                const auto gs = gen_simes_critvals_closed_form(n, k, alpha);
                const auto gh = gen_hochberg_critvals_closed_form(n, k, alpha);
                if (k <= static_cast<int>(std::floor(1.0 / alpha + 1e-9))) {
                    std::vector<double> simes(gs.values.size());
                    for (int i = k; i <= n; ++i) simes[i - k] = i * alpha / n;
                    c.add("gen-simes >= i*alpha/n " + tag, "", "", "componentwise", all_geq(gs.values, simes));
                    const auto lr = lr_critvals(n, k, alpha);
                    c.add("gen-hochberg >= lr " + tag, "", "", "componentwise", all_geq(gh.values, lr.values));
                }
                c.add("shared top constant " + tag, fmt(gs.values.back(), "%.12g"), fmt(gh.values.back(), "%.12g"),
                      "1e-12", std::abs(gs.values.back() - gh.values.back()) <= 1e-12);
            }
        }
    }
    for (double rho : kRhos) {
        for (int k = 1; k <= 3; ++k) {
            const auto gs = gen_simes_critvals(10, k, 0.05, equicorr(rho));
            const auto gh = gen_hochberg_critvals(10, k, 0.05, equicorr(rho));
            c.add("gen-simes >= gen-hochberg rho=" + fmt(rho) + " k=" + std::to_string(k), "", "", "componentwise",
                  all_geq(gs.values, gh.values, 1e-10));
        }
    }
    // Rejection-set inclusion on random independent inputs.
    const auto gh = make_critvals(ProcedureId::gen_hochberg_stepup, 10, 2, 0.05, NullModel::independent());
    const auto lr = make_critvals(ProcedureId::lr_stepup, 10, 2, 0.05, NullModel::independent());
    std::vector<double> mu(10);
    int violations = 0;
    for (int r = 0; r < 1000; ++r) {
        Xoshiro256 rng = substream(seed, 1'000'000 + r);
        std::uniform_real_distribution<double> unif(0.0, 3.0);
        for (double& m : mu) m = unif(rng);
        const PValueSampler alt(NullModel::independent(), 10, mu);
        std::vector<double> p(10);
        alt.draw(seed, r, {}, p);
        std::sort(p.begin(), p.end());
        if (stepup_count(p, gh.padded) < stepup_count(p, lr.padded)) ++violations;
    }
    c.add("gen-hochberg stepup rejects superset of lr-stepup (1000 inputs)", std::to_string(violations) + " violations",
          "0", "exact", violations == 0);
    return c.take();
}

std::vector<CheckResult> suite_monotonicity() {
    Collector c("monotonicity");
    for (int k : {2, 3}) {
        for (double u : {0.01, 0.05, 0.1, 0.3}) {
            double prev = -1.0;
            bool ok = true;
            double worst = 0.0;
            for (int j = 0; j <= 9; ++j) {
                const double rho = 0.1 * j;
                const double g = gk_evaluate(equicorr(rho), k, u);
                if (g < prev - 1e-12) ok = false;
                worst = std::min(worst, g - prev);
                prev = g;
            }
            c.add("G_k nondecreasing in rho, k=" + std::to_string(k) + " u=" + fmt(u), fmt(worst), ">= 0", "1e-12",
                  ok);
        }
    }
    for (int k = 1; k <= 3; ++k) {
        for (int i = k; i <= 10; ++i) {
            bool ok_computed = true;
            bool ok_reference = true;
            double prev_c = 2.0;
            double prev_r = 2.0;
            for (double rho : kRhos) {
                const double v = gen_simes_critvals(10, k, 0.05, equicorr(rho)).alpha_at(i);
                const double r = reference_table1(rho, k)[i - k];
                ok_computed = ok_computed && v <= prev_c + 1e-12;
                ok_reference = ok_reference && r <= prev_r;
                prev_c = v;
                prev_r = r;
            }
            c.add("column nonincreasing in rho, k=" + std::to_string(k) + " i=" + std::to_string(i),
                  ok_computed ? "computed ok" : "computed violates", ok_reference ? "reference ok" : "reference violates",
                  "exact", ok_computed && ok_reference);
        }
    }
    return c.take();
}

}  // namespace

const std::vector<std::string>& verify_suite_names() {
    static const std::vector<std::string> names = {"table1", "table2", "lemma21", "exactness", "dominance",
                                                    "monotonicity"};
    return names;
}

std::vector<double> reference_table1(double rho, int k) {
    const int r = rho_index(rho);
    if (k == 1) {
        std::vector<double> v(10);
        for (int i = 1; i <= 10; ++i) v[i - 1] = 0.005 * i;
        return v;
    }
    if (k < 1 || k > 3) throw ConfigError("no reference values for k=" + std::to_string(k));
    return kTable1[r][k - 2];
}

double reference_table2(int n, int k, double rho) {
    if ((n != 10 && n != 20) || (k != 2 && k != 3)) throw ConfigError("no reference value for this (n, k)");
    return kTable2[n == 10 ? 0 : 1][k - 2][rho_index(rho)];
}

std::vector<CheckResult> run_verify_suite(std::string_view name, std::uint64_t seed) {
    if (name == "table1") return suite_table1();
    if (name == "table2") return suite_table2(seed);
    if (name == "lemma21") return suite_lemma21(seed);
    if (name == "exactness") return suite_exactness(seed);
    if (name == "dominance") return suite_dominance(seed);
    if (name == "monotonicity") return suite_monotonicity();
    if (name == "all") {
        std::vector<CheckResult> out;
        for (const auto& s : verify_suite_names()) {
            auto part = run_verify_suite(s, seed);
            out.insert(out.end(), part.begin(), part.end());
        }
        return out;
    }
    throw ConfigError("unknown suite '" + std::string(name) + "'");
}

}  // namespace kfwer
