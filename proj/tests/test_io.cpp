#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <functional>
#include <fstream>
#include <sstream>

#include "kfwer/crit_values.hpp"
#include "kfwer/io.hpp"
#include "kfwer/procedures.hpp"
#include "kfwer/simlab.hpp"

using Catch::Approx;
using namespace kfwer;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    const fs::path d = fs::temp_directory_path() / "kfwer_test_io";
    fs::create_directories(d);
    return d;
}

fs::path write_file(const std::string& name, const std::string& text) {
    const fs::path p = scratch_dir() / name;
    std::ofstream(p) << text;
    return p;
}

std::string error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("format_real", "[io]") {
    REQUIRE(io::format_real(0.05) == "0.05");
    REQUIRE(io::format_real(1.0 / 3.0) == "0.3333333333");
    REQUIRE(io::format_real(1e-12) == "1e-12");
    REQUIRE(io::format_real(std::nan("")) == "NA");
}

TEST_CASE("model specs", "[io]") {
    REQUIRE(io::parse_model_spec("independent").kind() == ModelKind::independent);
    const auto eq = io::parse_model_spec("equicorr:0.25");
    REQUIRE(eq.kind() == ModelKind::equicorrelated_normal);
    REQUIRE(eq.rho() == 0.25);
    const auto t = io::parse_model_spec("t:0.25:5:20000:7");
    REQUIRE(t.kind() == ModelKind::equicorrelated_t);
    REQUIRE(t.dof() == 5);
    REQUIRE(t.t_samples() == 20000);
    REQUIRE(t.t_seed() == 7);
    const auto f = write_file("load.txt", "# two blocks\n0.5\n\n0.5\n0.8660254038\n");
    const auto fm = io::parse_model_spec("factor:" + f.string());
    REQUIRE(fm.loadings().size() == 3);

    for (const char* bad : {"", "equicorr", "equicorr:abc", "equicorr:1.2", "t:0.2:5", "normal", "factor:/no/such/file",
                            "independent:1"}) {
        INFO(bad);
        REQUIRE_THROWS_AS(io::parse_model_spec(bad), ConfigError);
    }
    const auto badload = write_file("badload.txt", "0.5\nx\n");
    REQUIRE(error_of([&] { io::read_loadings_file(badload); }).find(":2:") != std::string::npos);
}

TEST_CASE("p-value files", "[io]") {
    std::istringstream ok("id,p\na,0.005\nb_2,0.025\n\nc-3,1\n");
    const auto p = io::read_pvalues(ok, "mem");
    REQUIRE(p.size() == 3);
    REQUIRE(p[1].id == "b_2");
    REQUIRE(p[2].p == 1.0);

    const auto msg = [](const std::string& text) {
        return error_of([&] {
            std::istringstream in(text);
            io::read_pvalues(in, "in.csv");
        });
    };
    REQUIRE(msg("id,p\na,1.5\n").find("in.csv:2:") != std::string::npos);
    REQUIRE(msg("id,p\na,0.1\nb,-0.1\n").find("in.csv:3:") != std::string::npos);
    REQUIRE(msg("id,p\na,0.1\na,0.2\n").find("duplicate") != std::string::npos);
    REQUIRE(msg("p,id\na,0.1\n").find("in.csv:1:") != std::string::npos);
    REQUIRE(msg("id,p\na b,0.1\n").find("in.csv:2:") != std::string::npos);
    REQUIRE(msg("id,p\na,0.1,3\n").find("in.csv:2:") != std::string::npos);
    REQUIRE(msg("id,p\na,zero\n").find("in.csv:2:") != std::string::npos);
    REQUIRE_FALSE(msg("id,p\n").empty());
    REQUIRE_FALSE(msg("").empty());
}

TEST_CASE("CSV writers", "[io]") {
    std::ostringstream cv;
    io::write_critvals_csv(cv, lr_critvals(3, 2, 0.05));
    REQUIRE(cv.str() == "i,alpha_i,padded_c_i\n1,NA,0.03333333333\n2,0.03333333333,0.03333333333\n3,0.05,0.05\n");

    const std::vector<PValueEntry> p = {{"b", 0.025}, {"a", 0.005}, {"c", 0.5}};
    std::ostringstream dec;
    io::write_decision_csv(dec, stepup_apply(p, classic_critvals(ProcedureId::classic_hochberg, 3, 0.05)));
    REQUIRE(dec.str() ==
            "id,p,rank,critical_value,rejected\n"
            "a,0.005,1,0.01666666667,1\n"
            "b,0.025,2,0.025,1\n"
            "c,0.5,3,0.05,0\n"
            "# procedure=classic-hochberg, n=3, k=1, alpha=0.05, i0=2\n");

    MetricsReport ok;
    ok.study = "s1";
    ok.rows.push_back({"s1", ProcedureId::gen_simes, Metric::kfwer, 0.05, 0.001, 1000, 9});
    ok.rows.push_back({"s1", ProcedureId::gen_simes, Metric::ave_power, std::nullopt, std::nullopt, 1000, 9});
    MetricsReport failed;
    failed.study = "s2";
    failed.error = "boom";
    std::ostringstream mx;
    io::write_metrics_csv(mx, {ok, failed});
    REQUIRE(mx.str() ==
            "study,procedure,metric,estimate,std_error,reps,seed\n"
            "s1,gen-simes,kfwer,0.05,0.001,1000,9\n"
            "s1,gen-simes,ave_power,NA,NA,1000,9\n"
            "# error study=s2: boom\n");
}

TEST_CASE("experiment JSON", "[io]") {
    const std::string one = R"({
        "schema_version": 1, "name": "demo", "n": 10, "k": 2, "alpha": 0.05,
        "model": {"kind": "equicorrelated_normal", "rho": 0.5},
        "n1": 3, "effect": 1.5, "procedures": ["gen-simes", "classic_simes"],
        "reps": 5000, "seed": 4, "metrics": ["power_at_least_k", "kfwer"]})";
    const auto cs = io::parse_experiment_json(one);
    REQUIRE(cs.size() == 1);
    const auto& c = cs[0];
    REQUIRE(c.name == "demo");
    REQUIRE(c.model.rho() == 0.5);
    REQUIRE(c.n1 == 3);
    REQUIRE(c.effect == 1.5);
    REQUIRE(c.procedures == std::vector<ProcedureId>{ProcedureId::gen_simes, ProcedureId::classic_simes});
    REQUIRE(c.metrics.size() == 2);
    REQUIRE(c.seed == 4);

    const std::string many = R"({"configs": [
        {"n": 4, "k": 1, "alpha": 0.1, "model": {"kind": "independent"}, "mu": [0, 0, 1, 2],
         "procedures": ["lr-stepup"], "reps": 1000, "metrics": ["ave_power"]},
        {"n": 4, "k": 2, "alpha": 0.1, "model": {"kind": "factor_normal", "loadings_file": "load4.txt"},
         "procedures": ["gen-simes"], "reps": 1000, "metrics": ["kfwer"]},
        {"n": 4, "k": 2, "alpha": 0.1, "model": {"kind": "equicorrelated_t", "rho": 0.2, "dof": 4, "samples": 2000},
         "critical_model": {"kind": "equicorr", "rho": 0.2},
         "procedures": ["gen-simes"], "reps": 1000, "metrics": ["kfwer"]}]})";
    write_file("load4.txt", "0.5\n0.5\n0.6\n0.6\n");
    const auto path = write_file("many.json", many);
    const auto list = io::read_experiment_file(path);
    REQUIRE(list.size() == 3);
    REQUIRE(list[0].mu == std::vector<double>{0, 0, 1, 2});
    REQUIRE(list[1].model.loadings().size() == 4);
    REQUIRE(list[2].model.kind() == ModelKind::equicorrelated_t);
    REQUIRE(list[2].crit_model().kind() == ModelKind::equicorrelated_normal);

    SECTION("schema violations") {
        const auto bad = [](const std::string& text) { return !error_of([&] { io::parse_experiment_json(text); }).empty(); };
        REQUIRE(bad("{"));
        REQUIRE(bad(R"({"schema_version": 2, "n": 4, "k": 1, "alpha": 0.1, "model": {"kind": "independent"},
                        "procedures": ["lr-stepup"], "reps": 1000, "metrics": ["kfwer"]})"));
        REQUIRE(bad(R"({"n": 4, "k": 1, "alpha": 0.1, "model": {"kind": "independent"}, "colour": 1,
                        "procedures": ["lr-stepup"], "reps": 1000, "metrics": ["kfwer"]})"));
        REQUIRE(bad(R"({"n": 4, "k": 1, "alpha": 0.1, "model": {"kind": "independent"},
                        "procedures": ["lr-stepup"], "reps": 0, "metrics": ["kfwer"]})"));
        REQUIRE(bad(R"({"n": 4, "k": 1, "alpha": 0.1, "model": {"kind": "independent"},
                        "procedures": ["lr-stepup"], "reps": 1000.5, "metrics": ["kfwer"]})"));
        REQUIRE(bad(R"({"n": 4, "k": 1, "alpha": 0.1, "model": {"kind": "cauchy"},
                        "procedures": ["lr-stepup"], "reps": 1000, "metrics": ["kfwer"]})"));
        REQUIRE(bad(R"({"n": 4, "k": 1, "alpha": 0.1, "model": {"kind": "independent"}, "mu": [0,0,0,1], "n1": 1,
                        "procedures": ["lr-stepup"], "reps": 1000, "metrics": ["kfwer"]})"));
        REQUIRE(bad(R"({"n": 4, "k": 1, "alpha": 0.1, "model": {"kind": "independent"},
                        "procedures": ["bh"], "reps": 1000, "metrics": ["kfwer"]})"));
        REQUIRE(bad(R"({"configs": [], "extra": true})"));
    }
}
