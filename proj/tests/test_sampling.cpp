#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "kfwer/rng.hpp"
#include "kfwer/sampling.hpp"
#include "kfwer/studies.hpp"

using Catch::Approx;
using namespace kfwer;

namespace {

struct Moments {
    double mean0 = 0.0;
    double var0 = 0.0;
    double corr01 = 0.0;
    double p_below_05 = 0.0;
    double p_mean = 0.0;
};

Moments moments(const SampleBatch& b) {
    Moments m;
    double s0 = 0, s1 = 0, s00 = 0, s11 = 0, s01 = 0;
    long below = 0;
    double psum = 0;
    for (long r = 0; r < b.count; ++r) {
        const auto x = b.stats_row(r);
        const auto p = b.pvalue_row(r);
        s0 += x[0];
        s1 += x[1];
        s00 += x[0] * x[0];
        s11 += x[1] * x[1];
        s01 += x[0] * x[1];
        below += p[0] <= 0.05;
        psum += p[0];
    }
    const double c = static_cast<double>(b.count);
    m.mean0 = s0 / c;
    m.var0 = s00 / c - m.mean0 * m.mean0;
    const double var1 = s11 / c - (s1 / c) * (s1 / c);
    m.corr01 = (s01 / c - m.mean0 * s1 / c) / std::sqrt(m.var0 * var1);
    m.p_below_05 = below / c;
    m.p_mean = psum / c;
    return m;
}

constexpr long kCount = 200'000;

}  // namespace

TEST_CASE("xoshiro substreams", "[sampling][rng]") {
    auto a = substream(7, 3);
    auto b = substream(7, 3);
    auto c = substream(7, 4);
    auto d = substream(8, 3);
    const auto a1 = a();
    REQUIRE(a1 == b());
    REQUIRE(a1 != c());
    REQUIRE(a1 != d());
    Xoshiro256 g(42);
    double sum = 0.0;
    for (int i = 0; i < 100'000; ++i) sum += static_cast<double>(g() >> 11) * 0x1.0p-53;
    REQUIRE(sum / 100'000 == Approx(0.5).margin(4.0 * std::sqrt(1.0 / 12.0 / 100'000)));
}

TEST_CASE("null p-values are uniform with the right dependence", "[sampling]") {
    const double se_p = std::sqrt(0.05 * 0.95 / kCount);
    SECTION("equicorrelated normal") {
        for (double rho : {0.0, 0.25, 0.75}) {
            const auto m = moments(sample_equicorr_normal(5, rho, {}, kCount, 11));
            REQUIRE(std::abs(m.p_below_05 - 0.05) <= 4.0 * se_p);
            REQUIRE(m.p_mean == Approx(0.5).margin(4.0 * std::sqrt(1.0 / 12.0 / kCount)));
            REQUIRE(m.mean0 == Approx(0.0).margin(4.0 / std::sqrt(kCount)));
            REQUIRE(m.var0 == Approx(1.0).margin(0.015));
            REQUIRE(m.corr01 == Approx(rho).margin(0.01));
        }
    }
    SECTION("factor normal correlations are products of loadings") {
        const auto load = two_block_loadings(4);
        const auto b = sample_factor_normal(load, {}, kCount, 12);
        REQUIRE(moments(b).corr01 == Approx(0.25).margin(0.01));
        double s02 = 0;
        for (long r = 0; r < b.count; ++r) s02 += b.stats_row(r)[0] * b.stats_row(r)[2];
        REQUIRE(s02 / kCount == Approx(load[0] * load[2]).margin(0.015));
        REQUIRE(std::abs(moments(b).p_below_05 - 0.05) <= 4.0 * se_p);
    }
    SECTION("equicorrelated t has Student marginals") {
        const auto m = moments(sample_equicorr_t(3, 0.25, 5, {}, kCount, 13));
        REQUIRE(std::abs(m.p_below_05 - 0.05) <= 4.0 * se_p);
        REQUIRE(m.var0 == Approx(5.0 / 3.0).margin(0.08));
        // The shared chi-square divisor adds dependence beyond rho.
        REQUIRE(m.corr01 == Approx(0.25).margin(0.02));
    }
}

TEST_CASE("means shift statistics, not the tail function", "[sampling]") {
    const std::vector<double> mu = {2.0, 0.0, -1.0};
    const auto b = sample_equicorr_normal(3, 0.5, mu, kCount, 21);
    REQUIRE(moments(b).mean0 == Approx(2.0).margin(0.01));
    PValueSampler s(NullModel::equicorrelated_normal(0.5), 3, mu);
    for (long r = 0; r < 100; ++r) {
        for (int i = 0; i < 3; ++i) REQUIRE(b.pvalue_row(r)[i] == s.upper_tail(b.stats_row(r)[i]));
    }
    REQUIRE(s.upper_tail(0.0) == Approx(0.5).margin(1e-15));
}

TEST_CASE("draws are a pure function of (seed, index)", "[sampling]") {
    PValueSampler s(NullModel::equicorrelated_normal(0.3), 6);
    std::vector<double> x1(6), p1(6), x2(6), p2(6), x3(6), p3(6);
    s.draw(5, 17, x1, p1);
    s.draw(5, 18, x3, p3);
    s.draw(5, 17, x2, p2);
    REQUIRE(x1 == x2);
    REQUIRE(p1 == p2);
    REQUIRE(x1 != x3);
    REQUIRE(s.draw_max_pvalue(5, 17) == *std::max_element(p1.begin(), p1.end()));

    const auto batch = sample_batch(s, 1000, 5);
    REQUIRE(std::equal(p1.begin(), p1.end(), batch.pvalue_row(17).begin()));
    REQUIRE(sample_batch(s, 1000, 5).pvalues == batch.pvalues);

    std::vector<double> only_p(6);
    s.draw(5, 17, {}, only_p);
    REQUIRE(only_p == p1);
}

TEST_CASE("sampler validation", "[sampling]") {
    REQUIRE_THROWS_AS(PValueSampler(NullModel::independent(), 0), ConfigError);
    REQUIRE_THROWS_AS(PValueSampler(NullModel::independent(), 3, {1.0, 2.0}), ConfigError);
    REQUIRE_THROWS_AS(PValueSampler(NullModel::independent(), 2, {1.0, std::nan("")}), ConfigError);
    REQUIRE_THROWS_AS(PValueSampler(NullModel::factor_normal({0.5, 0.5}), 3), ConfigError);
    const auto emp = gk_empirical_build(NullModel::independent(), 2, 1000, 1);
    REQUIRE_THROWS_AS(PValueSampler(emp, 2), ConfigError);
    PValueSampler s(NullModel::independent(), 3);
    std::vector<double> wrong(2);
    REQUIRE_THROWS_AS(s.draw(1, 0, wrong, {}), ConfigError);
    REQUIRE_THROWS_AS(sample_batch(s, 0, 1), ConfigError);
    REQUIRE_THROWS_AS(sample_equicorr_normal(3, 1.0, {}, 10, 1), ConfigError);
}
