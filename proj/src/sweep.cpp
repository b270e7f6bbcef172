#include "robustbid/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "json.hpp"
#include "robustbid/format.hpp"
#include "robustbid/metrics.hpp"
#include "robustbid/simulator.hpp"

#ifndef ROBUSTBID_BUILD_ID
#define ROBUSTBID_BUILD_ID "unknown"
#endif

namespace robustbid {

const char* build_id() { return ROBUSTBID_BUILD_ID; }

Dataset materialize_dataset(const RunConfig& cfg) {
    if (!cfg.dataset_preset.empty()) {
        Dataset ds = generate_preset(cfg.dataset_preset, cfg.dataset_seed);
        return ds;
    }
    Dataset ds = load_csv(cfg.dataset);
    if (cfg.dataset.kind == DatasetKind::CsvSmoothed)
        apply_kde_competitors(ds, cfg.dataset.kde_bandwidth, cfg.dataset_seed);
    return ds;
}

namespace {

struct Task {
    PolicyKind policy;
    double eps_a;
    double eps_b;
    std::uint64_t seed;
};

SweepResult run_task(const RunConfig& cfg, const Dataset& ds, const Task& task) {
    SimulationConfig sim;
    sim.T = cfg.T > 0 ? cfg.T : static_cast<int>(ds.rounds.size());
    sim.eps_a = task.eps_a;
    sim.eps_b = task.eps_b;
    sim.seed = task.seed;
    sim.warmup_bid = cfg.warmup_bid;
    sim.warmup_rounds = cfg.warmup_rounds;
    sim.bernoulli = cfg.bernoulli;
    sim.full_fit_every = cfg.full_fit_every;
    const std::size_t n = ds.budgets.size();
    sim.campaigns.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        Campaign& c = sim.campaigns[i];
        c.id = static_cast<int>(i);
        c.budget = ds.budgets[i];
        c.cpc_cap = ds.cpc_caps[i];
        c.policy = task.policy;
        c.eps_a = task.eps_a;
        c.eps_b = task.eps_b;
        c.risk_alpha = cfg.risk_alpha;
    }
    Simulator run(sim, ds);
    run.run();
    return run.result_row();
}

}  // namespace

std::vector<SweepResult> run_sweep(const RunConfig& cfg, const Dataset& dataset, int jobs) {
    std::vector<Task> tasks;
    for (PolicyKind policy : cfg.policies)
        for (double ea : cfg.eps_a_grid)
            for (double eb : cfg.eps_b_grid)
                for (std::uint64_t seed : cfg.seeds) tasks.push_back({policy, ea, eb, seed});

    std::vector<SweepResult> rows(tasks.size());
    if (jobs <= 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i) rows[i] = run_task(cfg, dataset, tasks[i]);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= tasks.size()) return;
                rows[i] = run_task(cfg, dataset, tasks[i]);
            }
        };
        std::vector<std::thread> pool;
        const int n_threads = std::min<int>(jobs, static_cast<int>(tasks.size()));
        pool.reserve(n_threads);
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    std::sort(rows.begin(), rows.end(), [](const SweepResult& a, const SweepResult& b) {
        return std::tie(a.policy, a.eps_a, a.eps_b, a.seed) <
               std::tie(b.policy, b.eps_a, b.eps_b, b.seed);
    });
    return rows;
}

void write_results_csv(const std::vector<SweepResult>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write results file: " + path);
    out << "policy,eps_a,eps_b,seed,tcv,cpc_avg,spend_total,clicks_expected,flags\n";
    for (const SweepResult& r : rows) {
        out << to_string(r.policy) << ',' << format_double(r.eps_a) << ','
            << format_double(r.eps_b) << ',' << r.seed << ',' << format_double(r.tcv) << ',';
        if (r.cpc_avg) out << format_double(*r.cpc_avg);
        out << ',' << format_double(r.spend_total) << ',' << format_double(r.clicks_expected)
            << ',';
        for (std::size_t i = 0; i < r.flags.size(); ++i) {
            if (i > 0) out << ';';
            out << r.flags[i];
        }
        out << '\n';
    }
}

void write_summary_json(const std::vector<SweepResult>& rows, const Dataset& dataset,
                        const std::string& path) {
    nlohmann::ordered_json root;
    root["dataset"] = {{"kind", to_string(dataset.kind)}, {"name", dataset.name}};
    root["build_id"] = build_id();
    nlohmann::ordered_json cells = nlohmann::ordered_json::array();
    for (const auto& [key, stats] : aggregate(rows)) {
        nlohmann::ordered_json cell;
        cell["policy"] = to_string(key.policy);
        cell["eps_a"] = key.eps_a;
        cell["eps_b"] = key.eps_b;
        cell["mean_tcv"] = stats.mean_tcv;
        cell["std_tcv"] = stats.std_tcv;
        cell["mean_cpc"] = stats.mean_cpc ? nlohmann::ordered_json(*stats.mean_cpc)
                                          : nlohmann::ordered_json(nullptr);
        cell["std_cpc"] = stats.std_cpc ? nlohmann::ordered_json(*stats.std_cpc)
                                        : nlohmann::ordered_json(nullptr);
        cell["n_seeds"] = stats.n_seeds;
        cell["n_flagged"] = stats.n_flagged;
        cells.push_back(std::move(cell));
    }
    root["cells"] = std::move(cells);

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write summary file: " + path);
    out << root.dump(2) << '\n';
}

SweepOutputs run_sweep_to_files(const RunConfig& cfg, const std::string& out_dir, int jobs) {
    std::filesystem::create_directories(out_dir);
    const Dataset ds = materialize_dataset(cfg);
    const std::vector<SweepResult> rows = run_sweep(cfg, ds, jobs);

    SweepOutputs outputs;
    outputs.csv_path = (std::filesystem::path(out_dir) / (cfg.out_prefix + "_results.csv")).string();
    outputs.summary_path =
        (std::filesystem::path(out_dir) / (cfg.out_prefix + "_summary.json")).string();
    write_results_csv(rows, outputs.csv_path);
    write_summary_json(rows, ds, outputs.summary_path);
    return outputs;
}

}  // namespace robustbid
