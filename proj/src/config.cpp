#include "robustbid/config.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace robustbid {

std::vector<double> logspace(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi >= lo) || n < 1)
        throw std::invalid_argument("logspace needs 0 < lo <= hi and n >= 1");
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double step = (std::log10(hi) - std::log10(lo)) / (n - 1);
    for (int i = 0; i < n; ++i) out[i] = std::pow(10.0, std::log10(lo) + step * i);
    out.back() = hi;  // pin the endpoint against rounding drift
    return out;
}

RunConfig default_run_config() {
    RunConfig cfg;
    cfg.dataset = preset_spec("synthetic");
    cfg.policies = {PolicyKind::NonRobust, PolicyKind::Risk, PolicyKind::RobustCtr,
                    PolicyKind::RobustCvr, PolicyKind::RobustJoint};
    cfg.eps_a_grid = logspace(1e-6, 1e-2, 7);
    cfg.eps_b_grid = logspace(1e-6, 1e-2, 7);
    cfg.seeds.resize(10);
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) cfg.seeds[i] = i;
    return cfg;
}

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& what) {
    throw std::runtime_error("config: " + what);
}

// A grid is either an array of numbers or {"logspace": [lo, hi, n]}.
std::vector<double> parse_grid(const json& node, const std::string& key) {
    if (node.is_number()) return {node.get<double>()};
    if (node.is_array()) {
        std::vector<double> out;
        for (const json& v : node) {
            if (!v.is_number()) config_error(key + " entries must be numbers");
            out.push_back(v.get<double>());
        }
        if (out.empty()) config_error(key + " grid is empty");
        for (double e : out)
            if (e < 0.0) config_error(key + " entries must be >= 0");
        return out;
    }
    if (node.is_object() && node.contains("logspace")) {
        const json& args = node["logspace"];
        if (!args.is_array() || args.size() != 3)
            config_error(key + ".logspace needs [lo, hi, n]");
        return logspace(args[0].get<double>(), args[1].get<double>(), args[2].get<int>());
    }
    config_error(key + " must be a number, an array, or {\"logspace\": [lo, hi, n]}");
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) config_error("cannot open " + path);
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        config_error(path + ": " + e.what());
    }

    RunConfig cfg = default_run_config();

    if (root.contains("dataset")) {
        const json& d = root["dataset"];
        if (d.contains("preset")) {
            cfg.dataset_preset = d["preset"].get<std::string>();
            try {
                cfg.dataset = preset_spec(cfg.dataset_preset);
            } catch (const std::invalid_argument& e) {
                config_error(e.what());
            }
        }
        if (d.contains("path")) {
            cfg.dataset_preset.clear();
            cfg.dataset.path = d["path"].get<std::string>();
            cfg.dataset.kind = DatasetKind::CsvReplay;
        }
        if (d.contains("smoothing")) {
            const std::string s = d["smoothing"].get<std::string>();
            if (s == "kde") {
                cfg.dataset.kind = DatasetKind::CsvSmoothed;
            } else if (s != "none") {
                config_error("dataset.smoothing must be \"kde\" or \"none\"");
            }
        }
        if (d.contains("kde_bandwidth")) {
            const json& bw = d["kde_bandwidth"];
            cfg.dataset.kde_bandwidth =
                bw.is_string() ? -1.0 : bw.get<double>();  // "auto" or a number
        }
        if (d.contains("seed")) cfg.dataset_seed = d["seed"].get<std::uint64_t>();
        if (d.contains("T")) cfg.dataset.T = d["T"].get<int>();
        if (d.contains("n_advertisers")) cfg.dataset.n_advertisers = d["n_advertisers"].get<int>();
        if (d.contains("budget")) cfg.dataset.budget = d["budget"].get<double>();
        if (d.contains("cpc_cap")) cfg.dataset.cpc_cap = d["cpc_cap"].get<double>();
        if (d.contains("ctr_range")) {
            cfg.dataset.ctr_range = {d["ctr_range"][0].get<double>(),
                                     d["ctr_range"][1].get<double>()};
        }
        if (d.contains("cvr_range")) {
            cfg.dataset.cvr_range = {d["cvr_range"][0].get<double>(),
                                     d["cvr_range"][1].get<double>()};
        }
    }

    if (root.contains("simulation")) {
        const json& s = root["simulation"];
        if (s.contains("T")) cfg.T = s["T"].get<int>();
        if (s.contains("warmup_rounds")) cfg.warmup_rounds = s["warmup_rounds"].get<int>();
        if (s.contains("warmup_bid")) cfg.warmup_bid = s["warmup_bid"].get<double>();
        if (s.contains("full_fit_every")) cfg.full_fit_every = s["full_fit_every"].get<int>();
        if (s.contains("bernoulli")) cfg.bernoulli = s["bernoulli"].get<bool>();
        if (s.contains("risk_alpha")) cfg.risk_alpha = s["risk_alpha"].get<double>();
    }

    if (root.contains("sweep")) {
        const json& s = root["sweep"];
        if (s.contains("policies")) {
            cfg.policies.clear();
            for (const json& p : s["policies"]) {
                const std::string name = p.get<std::string>();
                const auto kind = parse_policy(name);
                if (!kind) config_error("unknown policy " + name);
                cfg.policies.push_back(*kind);
            }
            if (cfg.policies.empty()) config_error("sweep.policies is empty");
        }
        if (s.contains("eps_a")) cfg.eps_a_grid = parse_grid(s["eps_a"], "sweep.eps_a");
        if (s.contains("eps_b")) cfg.eps_b_grid = parse_grid(s["eps_b"], "sweep.eps_b");
        if (s.contains("seeds")) {
            cfg.seeds.clear();
            for (const json& v : s["seeds"]) cfg.seeds.push_back(v.get<std::uint64_t>());
            if (cfg.seeds.empty()) config_error("sweep.seeds is empty");
        } else if (s.contains("n_seeds")) {
            const int n = s["n_seeds"].get<int>();
            if (n < 1) config_error("sweep.n_seeds must be >= 1");
            cfg.seeds.resize(n);
            for (int i = 0; i < n; ++i) cfg.seeds[i] = static_cast<std::uint64_t>(i);
        }
        if (s.contains("out_prefix")) cfg.out_prefix = s["out_prefix"].get<std::string>();
    }

    if (cfg.eps_a_grid.empty() || cfg.eps_b_grid.empty()) config_error("epsilon grid is empty");
    if (cfg.dataset_preset.empty() && cfg.dataset.path.empty())
        config_error("dataset needs a preset or a path");
    return cfg;
}

}  // namespace robustbid
