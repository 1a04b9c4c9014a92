#pragma once

// Built-in verification suites used by `kfwer verify`.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace kfwer {

struct CheckResult {
    std::string suite;
    std::string name;
    std::string estimate;
    std::string reference;
    std::string tolerance;
    bool pass = false;
};

// table1, table2, lemma21, exactness, dominance, monotonicity.
const std::vector<std::string>& verify_suite_names();

// `all` runs every suite. ConfigError for an unknown name.
std::vector<CheckResult> run_verify_suite(std::string_view name, std::uint64_t seed = 1);

// Published 4-decimal critical values for n = 10, alpha = 0.05.
// rho in {0, 0.25, 0.5, 0.75}, k in {1, 2, 3}; entries for i = k..10.
std::vector<double> reference_table1(double rho, int k);

// Published probabilities of 1..k-1 false rejections under the full null.
double reference_table2(int n, int k, double rho);

}  // namespace kfwer
