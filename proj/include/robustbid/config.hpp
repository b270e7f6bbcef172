#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "robustbid/datasets.hpp"
#include "robustbid/types.hpp"

namespace robustbid {

// One experiment: dataset source, simulation knobs, and the sweep grids.
// Loaded from a JSON file with `dataset` / `simulation` / `sweep` sections;
// the schema is documented in the README.
struct RunConfig {
    DatasetSpec dataset;
    std::string dataset_preset = "synthetic";  // empty when a csv path is given
    std::uint64_t dataset_seed = 1;

    int T = -1;  // simulation horizon; -1 means the full dataset
    int warmup_rounds = 5;
    double warmup_bid = -1.0;  // < 0 picks the 10% of B / T rule
    int full_fit_every = 10;
    bool bernoulli = false;
    double risk_alpha = 1.0;

    std::vector<PolicyKind> policies;
    std::vector<double> eps_a_grid;
    std::vector<double> eps_b_grid;
    std::vector<std::uint64_t> seeds;
    std::string out_prefix = "sweep";
};

// Synthetic protocol defaults: all five policies, the log-spaced 7-point
// epsilon grid over [1e-6, 1e-2] on both axes, seeds 0..9.
RunConfig default_run_config();

// Throws std::runtime_error with the offending key on invalid input.
RunConfig load_run_config(const std::string& path);

std::vector<double> logspace(double lo, double hi, int n);

}  // namespace robustbid
