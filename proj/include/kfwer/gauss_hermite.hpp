#pragma once

#include <vector>

namespace kfwer::num {

// Gauss-Hermite rule rescaled to the standard normal weight: sum w_i f(y_i)
// approximates the integral of f(y) phi(y). Nodes whose weight underflows are
// dropped, so size() can be smaller than order.
struct GaussHermiteRule {
    int order = 0;
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Rule with 64 * 2^level points, computed once per process and cached.
const GaussHermiteRule& gauss_hermite_rule(int level);

// Uncached construction for an arbitrary order >= 1.
GaussHermiteRule make_gauss_hermite_rule(int order);

}  // namespace kfwer::num
