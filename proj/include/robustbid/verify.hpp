#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace robustbid {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Oracle cross-checks, sized to their acceptance budgets. Each returns one
// row per property so the CLI can print a machine-readable table.

// Analytic worst-case rates against the projected-gradient ball minimizer.
std::vector<CheckResult> verify_worst_case(int instances = 100, std::uint64_t seed = 7);

// Fitted dual objectives against exhaustive binary primals.
std::vector<CheckResult> verify_duality(int instances = 50, std::uint64_t seed = 11);

// eps = 0 collapse of the robust bids and fits onto the non-robust ones.
std::vector<CheckResult> verify_consistency(int instances = 50, std::uint64_t seed = 13);

// Block-matrix PSD test against its scalar Schur reduction.
std::vector<CheckResult> verify_psd(int triples = 1000, std::uint64_t seed = 17);

// Metric recomputation from the win log against the running accumulators.
std::vector<CheckResult> verify_metrics(std::uint64_t seed = 19);

// A-term against a finite-difference derivative of the certificate f.
std::vector<CheckResult> verify_a_term(int points = 200, std::uint64_t seed = 23);

// Monte-Carlo coverage of the calibrated epsilon on held-out losses.
std::vector<CheckResult> verify_calibration(int trials = 1000, std::uint64_t seed = 29);

// Dispatch for the CLI suites: worst_case, duality, consistency, psd,
// metrics. Throws std::invalid_argument on an unknown name.
std::vector<CheckResult> run_suite(std::string_view name);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace robustbid
