#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "kfwer/gauss_hermite.hpp"
#include "kfwer/num_core.hpp"
#include "oracles.hpp"

using Catch::Approx;
using namespace kfwer;

TEST_CASE("Probability validates its range", "[num_core]") {
    REQUIRE(Probability(0.0).value() == 0.0);
    REQUIRE(Probability(1.0).value() == 1.0);
    REQUIRE_THROWS_AS(Probability(-1e-12), DomainError);
    REQUIRE_THROWS_AS(Probability(1.5), DomainError);
    REQUIRE_THROWS_AS(Probability(std::nan("")), DomainError);
}

TEST_CASE("AccuracySpec validation", "[num_core]") {
    AccuracySpec acc;
    REQUIRE_NOTHROW(acc.validate());
    REQUIRE(acc.abs_tol <= 1e-8);
    acc.max_refinements = 3;
    REQUIRE_THROWS_AS(acc.validate(), ConfigError);
    acc = AccuracySpec{};
    acc.abs_tol = 0.0;
    REQUIRE_THROWS_AS(acc.validate(), ConfigError);
}

TEST_CASE("normal_cdf", "[num_core]") {
    REQUIRE(num::normal_cdf(0.0) == 0.5);
    for (double x : {0.1, 0.7, 1.3, 2.5, 3.9}) {
        REQUIRE(num::normal_cdf(x) + num::normal_cdf(-x) == Approx(1.0).margin(1e-14));
    }
    SECTION("agrees with the erf series oracle") {
        REQUIRE(num::normal_cdf(1.959964) == Approx(static_cast<double>(oracle::normal_cdf(1.959964L))).margin(1e-12));
        REQUIRE(num::normal_cdf(1.959964) == Approx(0.975).margin(1e-6));
        for (double x = -4.0; x <= 4.0; x += 0.37) {
            REQUIRE(num::normal_cdf(x) == Approx(static_cast<double>(oracle::normal_cdf(x))).margin(1e-12));
        }
    }
    SECTION("strictly increasing") {
        double prev = 0.0;
        for (double x = -8.0; x <= 8.0; x += 0.05) {
            const double v = num::normal_cdf(x);
            REQUIRE(v > prev);
            prev = v;
        }
    }
    SECTION("non-finite input") {
        REQUIRE_THROWS_AS(num::normal_cdf(std::numeric_limits<double>::infinity()), DomainError);
        REQUIRE_THROWS_AS(num::normal_cdf(std::nan("")), DomainError);
    }
    SECTION("upper tail keeps relative accuracy") {
        REQUIRE(num::normal_sf(10.0) == Approx(7.619853024160527e-24).epsilon(1e-12));
    }
}

TEST_CASE("normal_quantile", "[num_core]") {
    REQUIRE(num::normal_quantile(0.5) == Approx(0.0).margin(1e-15));
    const double bisected = oracle::bisect([](double x) { return static_cast<double>(oracle::normal_cdf(x)) - 0.975; },
                                           0.0, 10.0);
    REQUIRE(num::normal_quantile(0.975) == Approx(bisected).margin(1e-11));
    REQUIRE(num::normal_quantile(0.975) == Approx(1.959964).margin(1e-6));
    for (int i = 1; i <= 999; ++i) {
        const double p = i / 1000.0;
        REQUIRE(num::normal_quantile(p) == Approx(-num::normal_quantile(1.0 - p)).margin(1e-12));
        REQUIRE(num::normal_cdf(num::normal_quantile(p)) == Approx(p).margin(1e-12));
    }
    REQUIRE(num::normal_isf(0.05) == Approx(-num::normal_quantile(0.05)).margin(1e-15));
    REQUIRE(num::normal_isf(1e-300) == Approx(37.0471).margin(1e-3));
    REQUIRE_THROWS_AS(num::normal_quantile(0.0), DomainError);
    REQUIRE_THROWS_AS(num::normal_quantile(1.0), DomainError);
    REQUIRE_THROWS_AS(num::normal_quantile(-0.2), DomainError);
}

TEST_CASE("integrate_gaussian", "[num_core]") {
    REQUIRE(num::integrate_gaussian([](double) { return 1.0; }) == Approx(1.0).margin(1e-12));
    REQUIRE(num::integrate_gaussian([](double y) { return y * y; }) == Approx(1.0).margin(1e-12));
    REQUIRE(num::integrate_gaussian([](double y) { return y <= 0.0 ? 1.0 : 0.0; }, AccuracySpec{1e-3, 1e-3, 10}) ==
            Approx(0.5).margin(1e-3));
    SECTION("Gaussian convolution closed form") {
        for (double a : {-2.0, 0.0, 2.0}) {
            for (double b : {0.5, 1.0, 2.0}) {
                const double got = num::integrate_gaussian([=](double y) { return num::normal_cdf(a + b * y); });
                REQUIRE(got == Approx(num::normal_cdf(a / std::sqrt(1.0 + b * b))).margin(1e-9));
            }
        }
    }
    SECTION("non-convergence reports the last two estimates") {
        // A jump at 0.3 cannot be resolved to 1e-15 by polynomial rules.
        try {
            num::integrate_gaussian([](double y) { return y < 0.3 ? 1.0 : 0.0; }, AccuracySpec{1e-15, 1e-15, 4});
            FAIL("expected ConvergenceError");
        } catch (const ConvergenceError& e) {
            REQUIRE(std::isfinite(e.previous_estimate()));
            REQUIRE(std::isfinite(e.last_estimate()));
            REQUIRE(e.last_estimate() == Approx(num::normal_cdf(0.3)).margin(0.05));
        }
    }
}

TEST_CASE("Gauss-Hermite rules integrate polynomials exactly", "[num_core][gauss_hermite]") {
    for (int level = 0; level <= 4; ++level) {
        const auto& rule = num::gauss_hermite_rule(level);
        REQUIRE(rule.order == 64 << level);
        double m0 = 0.0;
        double m2 = 0.0;
        double m4 = 0.0;
        double m6 = 0.0;
        double odd = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double y = rule.nodes[i];
            const double w = rule.weights[i];
            m0 += w;
            m2 += w * y * y;
            m4 += w * std::pow(y, 4);
            m6 += w * std::pow(y, 6);
            odd += w * std::pow(y, 3);
            if (i > 0) REQUIRE(rule.nodes[i] > rule.nodes[i - 1]);
        }
        REQUIRE(m0 == Approx(1.0).margin(1e-13));
        REQUIRE(m2 == Approx(1.0).margin(1e-13));
        REQUIRE(m4 == Approx(3.0).margin(1e-12));
        REQUIRE(m6 == Approx(15.0).margin(1e-11));
        REQUIRE(odd == Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("find_root", "[num_core]") {
    const AccuracySpec acc;
    REQUIRE(num::find_root([](double x) { return x - 0.3; }, 0.0, 1.0, acc) == Approx(0.3).margin(1e-10));
    REQUIRE(num::find_root([](double x) { return x * x - 0.05; }, 0.0, 1.0, acc) ==
            Approx(std::sqrt(0.05)).margin(1e-10));
    const double bisected = oracle::bisect([](double x) { return static_cast<double>(oracle::normal_cdf(x)) - 0.975; },
                                           0.0, 10.0);
    REQUIRE(num::find_root([](double x) { return num::normal_cdf(x) - 0.975; }, 0.0, 10.0, acc) ==
            Approx(bisected).margin(1e-9));

    SECTION("invariant under positive rescaling of g") {
        const auto g = [](double x) { return std::exp(x) - 2.0; };
        const double r1 = num::find_root(g, 0.0, 3.0, acc);
        for (double s : {1e-3, 0.5, 10.0}) {
            REQUIRE(num::find_root([&](double x) { return s * g(x); }, 0.0, 3.0, acc) == Approx(r1).margin(1e-9));
        }
    }
    SECTION("endpoint roots") {
        REQUIRE(num::find_root([](double x) { return x; }, 0.0, 1.0, acc) == 0.0);
        REQUIRE(num::find_root([](double x) { return x - 1.0; }, 0.0, 1.0, acc) == 1.0);
    }
    SECTION("no sign change") {
        REQUIRE_THROWS_AS(num::find_root([](double x) { return x + 1.0; }, 0.0, 1.0, acc), BracketError);
    }
    SECTION("tolerance that cannot be met") {
        // A jump never gets |g| below the tolerance.
        REQUIRE_THROWS_AS(num::find_root([](double x) { return x < 0.5 ? -1.0 : 1.0; }, 0.0, 1.0, acc),
                          ConvergenceError);
    }
}

TEST_CASE("binomial_tail", "[num_core]") {
    REQUIRE(num::binomial_tail(2, 2, 0.3) == Approx(0.09).margin(1e-15));
    REQUIRE(num::binomial_tail(1, 1, 0.3) == Approx(0.3).margin(1e-15));
    REQUIRE(num::binomial_tail(10, 2, 0.037) ==
            Approx(static_cast<double>(oracle::binomial_tail(10, 2, 0.037L))).margin(1e-14));
    REQUIRE(num::binomial_tail(10, 2, 0.037) == Approx(0.0506).margin(5e-5));
    REQUIRE(num::binomial_tail(7, 0, 0.42) == 1.0);

    SECTION("matches direct summation") {
        for (int m : {1, 5, 20, 60}) {
            for (int j0 = 0; j0 <= m; j0 += std::max(1, m / 7)) {
                for (double u : {0.001, 0.05, 0.3, 0.77}) {
                    const double ref = static_cast<double>(oracle::binomial_tail(m, j0, u));
                    REQUIRE(num::binomial_tail(m, j0, u) == Approx(ref).epsilon(1e-10).margin(1e-300));
                }
            }
        }
    }
    SECTION("monotone in u and j0") {
        for (int m : {10, 1000}) {
            double prev = 0.0;
            for (double u = 0.0; u <= 1.0; u += 0.01) {
                const double v = num::binomial_tail(m, 3, u);
                REQUIRE(v >= prev - 1e-15);
                prev = v;
            }
            prev = 1.0;
            for (int j0 = 0; j0 <= m; ++j0) {
                const double v = num::binomial_tail(m, j0, 0.4);
                REQUIRE(v <= prev + 1e-15);
                prev = v;
            }
        }
    }
    SECTION("large m stays finite") {
        const double v = num::binomial_tail(10'000, 5000, 0.5);
        REQUIRE(std::isfinite(v));
        REQUIRE(v == Approx(0.5 + 0.5 * 0.00797871).margin(1e-4));
    }
}

TEST_CASE("binomial coefficients", "[num_core]") {
    REQUIRE(num::binomial(10, 2) == 45.0);
    REQUIRE(num::binomial(20, 10) == 184756.0);
    REQUIRE(num::binomial(5, 6) == 0.0);
    REQUIRE(std::exp(num::log_binomial(1000, 5)) == Approx(static_cast<double>(oracle::choose(1000, 5))).epsilon(1e-12));
}
