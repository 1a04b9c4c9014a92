#include "kfwer/gauss_hermite.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "kfwer/errors.hpp"

namespace kfwer::num {
namespace {

constexpr int kBaseOrder = 64;
constexpr int kMaxLevel = 10;
constexpr double kRescale = 1e150;

struct HermiteEval {
    double pn;        // p_n(x) * exp(-log_scale)
    double pn1;       // p_{n-1}(x) * exp(-log_scale)
    double log_scale;
};

// Orthonormal Hermite polynomials (weight exp(-x^2)) by three-term recurrence,
// rescaled on the fly so that |x| up to sqrt(2n) does not overflow.
HermiteEval hermite_orthonormal(int n, double x) {
    double p_prev = 0.0;
    double p = std::pow(std::numbers::pi, -0.25);
    double log_scale = 0.0;
    for (int j = 1; j <= n; ++j) {
        const double next = std::sqrt(2.0 / j) * x * p - std::sqrt((j - 1.0) / j) * p_prev;
        p_prev = p;
        p = next;
        if (std::abs(p) > kRescale) {
            p /= kRescale;
            p_prev /= kRescale;
            log_scale += std::log(kRescale);
        }
    }
    return {p, p_prev, log_scale};
}

}  // namespace

GaussHermiteRule make_gauss_hermite_rule(int order) {
    if (order < 1) throw ConfigError("Gauss-Hermite order must be positive");
    const int n = order;
    const int half = (n + 1) / 2;
    std::vector<double> roots(n, 0.0);
    std::vector<double> log_w(n, 0.0);

    // Starting points: eigenvalues of the Jacobi matrix (diagonal 0, off-diagonal sqrt(j/2)).
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(std::max(n - 1, 0));
    for (int j = 1; j < n; ++j) sub[j - 1] = std::sqrt(0.5 * j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw ConvergenceError("Gauss-Hermite eigenvalue solve failed", 0.0, 0.0);
    const Eigen::VectorXd& guess = solver.eigenvalues();  // ascending

    for (int i = 0; i < half; ++i) {
        double z = guess[n - 1 - i];
        HermiteEval h{};
        bool converged = false;
        for (int it = 0; it < 20; ++it) {
            h = hermite_orthonormal(n, z);
            const double step = h.pn / (std::sqrt(2.0 * n) * h.pn1);
            z -= step;
            if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            throw ConvergenceError("Gauss-Hermite node iteration did not converge", z, z);
        }
        h = hermite_orthonormal(n, z);
        roots[i] = z;
        roots[n - 1 - i] = -z;
        const double lw = -std::log(static_cast<double>(n)) - 2.0 * (std::log(std::abs(h.pn1)) + h.log_scale);
        log_w[i] = lw;
        log_w[n - 1 - i] = lw;
    }
    for (int i = 1; i < n; ++i) {
        if (!(roots[i] < roots[i - 1])) {
            throw ConvergenceError("Gauss-Hermite nodes out of order", roots[i - 1], roots[i]);
        }
    }

    // exp(-x^2) rule -> standard normal weight: y = sqrt(2) x, w / sqrt(pi).
    GaussHermiteRule rule;
    rule.order = n;
    const double log_sqrt_pi = 0.5 * std::log(std::numbers::pi);
    for (int i = n - 1; i >= 0; --i) {
        const double w = std::exp(log_w[i] - log_sqrt_pi);
        if (w > 0.0) {
            rule.nodes.push_back(std::numbers::sqrt2 * roots[i]);
            rule.weights.push_back(w);
        }
    }
    return rule;
}

const GaussHermiteRule& gauss_hermite_rule(int level) {
    if (level < 0 || level > kMaxLevel) throw ConfigError("Gauss-Hermite level out of range");
    static std::array<GaussHermiteRule, kMaxLevel + 1> rules;
    static std::array<std::once_flag, kMaxLevel + 1> flags;
    std::call_once(flags[level], [level] { rules[level] = make_gauss_hermite_rule(kBaseOrder << level); });
    return rules[level];
}

}  // namespace kfwer::num
