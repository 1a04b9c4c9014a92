#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kfwer/null_models.hpp"
#include "kfwer/num_core.hpp"
#include "kfwer/studies.hpp"
#include "oracles.hpp"

using Catch::Approx;
using namespace kfwer;

namespace {

const double kQ25 = std::sqrt(0.25);
const double kQ75 = std::sqrt(0.75);

NullModel two_block() { return NullModel::factor_normal(two_block_loadings(20)); }

}  // namespace

TEST_CASE("model construction", "[null_models]") {
    REQUIRE_NOTHROW(NullModel::equicorrelated_normal(0.0));
    REQUIRE_NOTHROW(NullModel::equicorrelated_normal(0.99));
    REQUIRE_THROWS_AS(NullModel::equicorrelated_normal(-0.1), ConfigError);
    REQUIRE_THROWS_AS(NullModel::equicorrelated_normal(0.995), ConfigError);
    REQUIRE_THROWS_AS(NullModel::factor_normal({0.5, 1.0}), ConfigError);
    REQUIRE_THROWS_AS(NullModel::factor_normal({0.0, 0.5}), ConfigError);
    REQUIRE_THROWS_AS(NullModel::factor_normal({}), ConfigError);
    REQUIRE_THROWS_AS(NullModel::equicorrelated_t(0.25, 0), ConfigError);
    REQUIRE_THROWS_AS(NullModel::equicorrelated_t(0.25, 5, 999), ConfigError);
    REQUIRE(NullModel::equicorrelated_normal(0.25).describe() == "equicorr:0.25");
    REQUIRE(NullModel::equicorrelated_normal(0.25).key() != NullModel::equicorrelated_normal(0.5).key());
}

TEST_CASE("gk_evaluate", "[null_models]") {
    REQUIRE(gk_evaluate(NullModel::equicorrelated_normal(0.0), 2, 0.1) == Approx(0.01).margin(1e-15));
    REQUIRE(gk_evaluate(NullModel::independent(), 3, 0.2) == Approx(0.008).margin(1e-15));
    REQUIRE(gk_evaluate(NullModel::equicorrelated_normal(0.25), 2, 0.1769) == Approx(0.05).margin(2e-4));
    REQUIRE(gk_evaluate(NullModel::equicorrelated_normal(0.25), 3, 0.0297) ==
            Approx(0.05 * 6.0 / 720.0).margin(5e-6));

    SECTION("clamping outside (0,1)") {
        const auto m = NullModel::equicorrelated_normal(0.5);
        REQUIRE(gk_evaluate(m, 2, 0.0) == 0.0);
        REQUIRE(gk_evaluate(m, 2, -1.0) == 0.0);
        REQUIRE(gk_evaluate(m, 2, 1.0) == 1.0);
        REQUIRE(gk_evaluate(m, 2, 2.0) == 1.0);
        REQUIRE_THROWS_AS(gk_evaluate(m, 0, 0.5), ConfigError);
    }
    SECTION("k = 1 is the uniform marginal") {
        for (double u : {0.001, 0.05, 0.3, 0.9}) {
            REQUIRE(gk_evaluate(NullModel::equicorrelated_normal(0.6), 1, u) == Approx(u).margin(1e-9));
            REQUIRE(gk_evaluate(two_block(), 1, u) == Approx(u).margin(1e-9));
        }
    }
    SECTION("bounds u^k <= G <= u and monotone in u") {
        for (double rho : {0.1, 0.5, 0.9}) {
            const auto m = NullModel::equicorrelated_normal(rho);
            for (int k : {2, 3, 5}) {
                double prev = 0.0;
                for (double u = 0.01; u < 1.0; u += 0.04) {
                    const double g = gk_evaluate(m, k, u);
                    REQUIRE(g >= std::pow(u, k) - 1e-12);
                    REQUIRE(g <= u + 1e-12);
                    REQUIRE(g >= prev);
                    prev = g;
                }
            }
        }
    }
    SECTION("nondecreasing in rho") {
        for (int k : {2, 3}) {
            for (double u : {0.01, 0.05, 0.1, 0.3}) {
                double prev = 0.0;
                for (int j = 0; j <= 9; ++j) {
                    const double g = gk_evaluate(NullModel::equicorrelated_normal(0.1 * j), k, u);
                    REQUIRE(g >= prev - 1e-13);
                    prev = g;
                }
            }
        }
    }
}

TEST_CASE("gk_quantile", "[null_models]") {
    REQUIRE(gk_quantile(NullModel::independent(), 2, 0.05) == Approx(std::sqrt(0.05)).margin(1e-12));
    REQUIRE(gk_quantile(NullModel::equicorrelated_normal(0.5), 2, 0.05) == Approx(0.1357).margin(5e-5));
    REQUIRE(gk_quantile(NullModel::equicorrelated_normal(0.75), 3, 0.05) == Approx(0.1303).margin(5e-5));
    REQUIRE_THROWS_AS(gk_quantile(NullModel::independent(), 2, 0.0), DomainError);
    REQUIRE_THROWS_AS(gk_quantile(NullModel::independent(), 2, 1.0), DomainError);

    SECTION("roundtrip and residual on a Table-1-like grid") {
        for (double rho : {0.25, 0.5, 0.75}) {
            const auto m = NullModel::equicorrelated_normal(rho);
            for (int k : {2, 3}) {
                for (int i = k; i <= 10; ++i) {
                    const double target = 0.05 * oracle::choose(i, k) / oracle::choose(10, k);
                    const double q = gk_quantile(m, k, target);
                    REQUIRE(std::abs(gk_evaluate(m, k, q) - target) <= 1e-9);
                    REQUIRE(gk_quantile(m, k, gk_evaluate(m, k, q)) == Approx(q).margin(1e-7));
                }
            }
        }
    }
    SECTION("nonincreasing in rho") {
        double prev = 1.0;
        for (double rho : {0.0, 0.25, 0.5, 0.75}) {
            const double q = gk_quantile(NullModel::equicorrelated_normal(rho), 2, 0.05);
            REQUIRE(q <= prev);
            prev = q;
        }
    }
}

TEST_CASE("factor model subsets", "[null_models]") {
    SECTION("equal loadings reduce to the equicorrelated integral") {
        const auto f = NullModel::factor_normal(std::vector<double>(6, std::sqrt(0.4)));
        const std::vector<int> j = {2, 5};
        const std::vector<int> j3 = {1, 3, 6};
        for (double u : {0.02, 0.1, 0.4}) {
            REQUIRE(gk_factor_subset(f, j, u) ==
                    Approx(gk_evaluate(NullModel::equicorrelated_normal(0.4), 2, u)).margin(1e-9));
            REQUIRE(gk_factor_subset(f, j3, u) ==
                    Approx(gk_evaluate(NullModel::equicorrelated_normal(0.4), 3, u)).margin(1e-9));
            REQUIRE(gk_factor_averaged(f, 2, u) == Approx(gk_factor_subset(f, j, u)).margin(1e-12));
        }
    }
    SECTION("positive-dependence bounds") {
        const auto f = two_block();
        const std::vector<int> j = {3, 12, 17};
        for (double u : {0.01, 0.1, 0.5}) {
            const double g = gk_factor_subset(f, j, u);
            REQUIRE(g >= std::pow(u, 3) - 1e-12);
            REQUIRE(g <= u + 1e-12);
        }
    }
    SECTION("subset validation") {
        const auto f = two_block();
        const std::vector<int> bad_order = {5, 2};
        const std::vector<int> out_of_range = {1, 21};
        REQUIRE_THROWS_AS(gk_factor_subset(f, bad_order, 0.1), ConfigError);
        REQUIRE_THROWS_AS(gk_factor_subset(f, out_of_range, 0.1), ConfigError);
        REQUIRE_THROWS_AS(gk_factor_subset(NullModel::independent(), bad_order, 0.1), ConfigError);
    }
    SECTION("Monte Carlo oracle for a mixed pair") {
        const auto f = two_block();
        const std::vector<int> j = {1, 11};
        const double exact = gk_factor_subset(f, j, 0.1);
        oracle::FactorSampler sampler({kQ25, kQ75}, 20240601ULL);
        const long draws = 10'000'000;
        long hits = 0;
        std::vector<double> p;
        for (long r = 0; r < draws; ++r) {
            sampler.draw(p);
            hits += std::max(p[0], p[1]) <= 0.1;
        }
        const double est = static_cast<double>(hits) / draws;
        const double se = std::sqrt(est * (1.0 - est) / draws);
        REQUIRE(std::abs(est - exact) <= 4.0 * se);
    }
    SECTION("composition classes equal brute-force enumeration") {
        const auto f = two_block();
        for (double u : {0.03, 0.2}) {
            double sum = 0.0;
            int count = 0;
            for (int a = 1; a <= 20; ++a) {
                for (int b = a + 1; b <= 20; ++b) {
                    const std::vector<int> j = {a, b};
                    sum += gk_factor_subset(f, j, u);
                    ++count;
                }
            }
            REQUIRE(count == 190);
            REQUIRE(gk_factor_averaged(f, 2, u) == Approx(sum / count).margin(1e-12));
            // Class weights C(10,2), 10*10, C(10,2) over 190.
            const std::vector<int> low = {1, 2}, mixed = {1, 11}, high = {11, 12};
            const double weighted = (45.0 * gk_factor_subset(f, low, u) + 100.0 * gk_factor_subset(f, mixed, u) +
                                     45.0 * gk_factor_subset(f, high, u)) /
                                    190.0;
            REQUIRE(gk_factor_averaged(f, 2, u) == Approx(weighted).margin(1e-13));
        }
    }
    SECTION("averaged quantile lies between the two equicorrelated quantiles") {
        const double q = gk_quantile(two_block(), 2, 0.05);
        const double q25 = gk_quantile(NullModel::equicorrelated_normal(0.25), 2, 0.05);
        const double q75 = gk_quantile(NullModel::equicorrelated_normal(0.75), 2, 0.05);
        REQUIRE(q > q75);
        REQUIRE(q < q25);
        REQUIRE(q25 == Approx(0.1769).margin(5e-5));
        REQUIRE(q75 == Approx(0.0980).margin(5e-5));
    }
}

TEST_CASE("empirical G_k", "[null_models]") {
    SECTION("independent sampler") {
        const auto emp = gk_empirical_build(NullModel::independent(), 2, 1'000'000, 7);
        const double se = std::sqrt(0.05 * 0.95 / 1e6);
        REQUIRE(std::abs(gk_evaluate(emp, 2, 0.2236) - 0.05) <= 4.0 * se);
        REQUIRE(emp.kind() == ModelKind::empirical);
        REQUIRE_THROWS_AS(gk_evaluate(emp, 3, 0.2), ConfigError);
    }
    SECTION("equicorrelated sampler reproduces the quadrature quantile") {
        const auto emp = gk_empirical_build(NullModel::equicorrelated_normal(0.25), 2, 1'000'000, 9);
        const double q = gk_quantile(emp, 2, 0.05);
        const double exact = gk_quantile(NullModel::equicorrelated_normal(0.25), 2, 0.05);
        REQUIRE(exact == Approx(0.1769).margin(5e-5));
        // 4 SE on the probability scale, mapped through the local density of G.
        const double slope = (gk_evaluate(NullModel::equicorrelated_normal(0.25), 2, exact + 1e-4) -
                              gk_evaluate(NullModel::equicorrelated_normal(0.25), 2, exact - 1e-4)) /
                             2e-4;
        const double se_u = std::sqrt(0.05 * 0.95 / 1e6) / slope;
        REQUIRE(std::abs(q - exact) <= 4.0 * se_u);
    }
    SECTION("deterministic given the seed") {
        const auto a = gk_empirical_build(NullModel::equicorrelated_normal(0.5), 3, 20'000, 123);
        const auto b = gk_empirical_build(NullModel::equicorrelated_normal(0.5), 3, 20'000, 123);
        const auto c = gk_empirical_build(NullModel::equicorrelated_normal(0.5), 3, 20'000, 124);
        REQUIRE(a.store()->sorted_max == b.store()->sorted_max);
        REQUIRE(a.store()->sorted_max != c.store()->sorted_max);
        REQUIRE(std::is_sorted(a.store()->sorted_max.begin(), a.store()->sorted_max.end()));
    }
    SECTION("sample size floor") {
        REQUIRE_THROWS_AS(gk_empirical_build(NullModel::independent(), 2, 999, 1), ConfigError);
    }
    SECTION("t model builds its store lazily and caches it") {
        const auto t = NullModel::equicorrelated_t(0.25, 5, 50'000, 3);
        const auto s1 = t.t_store(2);
        const auto s2 = t.t_store(2);
        REQUIRE(s1.get() == s2.get());
        REQUIRE(s1->sorted_max.size() == 50'000u);
        const double q = gk_quantile(t, 2, 0.05);
        REQUIRE(gk_evaluate(t, 2, q) == Approx(0.05).margin(1e-4));
        REQUIRE(gk_evaluate(t, 1, 0.3) == Approx(0.3).margin(4.0 * std::sqrt(0.21 / 50'000)));
    }
}
