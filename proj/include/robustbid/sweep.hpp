#pragma once

#include <string>
#include <vector>

#include "robustbid/config.hpp"
#include "robustbid/datasets.hpp"
#include "robustbid/types.hpp"

namespace robustbid {

// git-describe string baked in at build time; "unknown" outside the repo.
const char* build_id();

Dataset materialize_dataset(const RunConfig& cfg);

// Cross product policies x eps_a x eps_b x seeds over the given dataset.
// Runs are share-nothing and may execute on `jobs` threads; rows come back
// canonically sorted (policy, eps_a, eps_b, seed) regardless of scheduling.
std::vector<SweepResult> run_sweep(const RunConfig& cfg, const Dataset& dataset, int jobs = 1);

void write_results_csv(const std::vector<SweepResult>& rows, const std::string& path);

void write_summary_json(const std::vector<SweepResult>& rows, const Dataset& dataset,
                        const std::string& path);

struct SweepOutputs {
    std::string csv_path;
    std::string summary_path;
};

// Full `run` subcommand body: dataset, sweep, both output files.
SweepOutputs run_sweep_to_files(const RunConfig& cfg, const std::string& out_dir, int jobs = 1);

}  // namespace robustbid
