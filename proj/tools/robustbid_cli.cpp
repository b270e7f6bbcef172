#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "robustbid/config.hpp"
#include "robustbid/datasets.hpp"
#include "robustbid/sweep.hpp"
#include "robustbid/verify.hpp"

int main(int argc, char** argv) {
    CLI::App app{"robust first-price autobidding: sweeps, datasets, self-checks"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    int jobs = 1;
    CLI::App* run = app.add_subcommand("run", "simulate the sweep described by a config file");
    run->add_option("--config", config_path, "JSON run configuration")->required();
    run->add_option("--out-dir", out_dir, "directory for the result files");
    run->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

    std::string suite;
    CLI::App* verify = app.add_subcommand("verify", "run one verification suite");
    verify->add_option("--suite", suite, "worst_case | duality | consistency | psd | metrics")
        ->required();

    std::string preset;
    std::uint64_t seed = 1;
    std::string out_path;
    CLI::App* gen = app.add_subcommand("gen-data", "write a preset dataset as csv");
    gen->add_option("--preset", preset, "synthetic | ipinyou-like | bat-like")->required();
    gen->add_option("--seed", seed, "generation seed")->required();
    gen->add_option("--out", out_path, "output csv path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const robustbid::RunConfig cfg = robustbid::load_run_config(config_path);
            const robustbid::SweepOutputs outputs =
                robustbid::run_sweep_to_files(cfg, out_dir, jobs);
            std::cout << outputs.csv_path << "\n" << outputs.summary_path << "\n";
        } else if (verify->parsed()) {
            const std::vector<robustbid::CheckResult> results = robustbid::run_suite(suite);
            for (const robustbid::CheckResult& r : results)
                std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail
                          << "\n";
            if (!robustbid::all_passed(results)) return 1;
        } else if (gen->parsed()) {
            const robustbid::Dataset dataset = robustbid::generate_preset(preset, seed);
            robustbid::write_dataset_csv(dataset, out_path);
            std::cout << out_path << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
