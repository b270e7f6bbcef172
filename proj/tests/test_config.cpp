#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "robustbid/config.hpp"

using namespace robustbid;

namespace {

std::string write_config(const char* stem, const std::string& body) {
    const std::string path = std::string("robustbid_test_") + stem + ".json";
    std::ofstream out(path);
    out << body;
    return path;
}

}  // namespace

TEST_CASE("logspace pins both endpoints") {
    const std::vector<double> g = logspace(1e-6, 1e-2, 7);
    REQUIRE(g.size() == 7);
    CHECK(g.front() == 1e-6);
    CHECK(g.back() == 1e-2);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);

    CHECK(logspace(0.5, 0.5, 1) == std::vector<double>{0.5});
    CHECK_THROWS_AS(logspace(1e-2, 1e-6, 3), std::invalid_argument);
    CHECK_THROWS_AS(logspace(0.0, 1e-2, 3), std::invalid_argument);
    CHECK_THROWS_AS(logspace(1e-6, 1e-2, 0), std::invalid_argument);
}

TEST_CASE("default run config matches the sweep protocol") {
    const RunConfig cfg = default_run_config();
    CHECK(cfg.dataset_preset == "synthetic");
    REQUIRE(cfg.policies.size() == 5);
    CHECK(cfg.policies[0] == PolicyKind::NonRobust);
    CHECK(cfg.policies[1] == PolicyKind::Risk);
    CHECK(cfg.policies[2] == PolicyKind::RobustCtr);
    CHECK(cfg.policies[3] == PolicyKind::RobustCvr);
    CHECK(cfg.policies[4] == PolicyKind::RobustJoint);

    REQUIRE(cfg.eps_a_grid.size() == 7);
    REQUIRE(cfg.eps_b_grid.size() == 7);
    CHECK(cfg.eps_a_grid.front() == 1e-6);
    CHECK(cfg.eps_a_grid.back() == 1e-2);
    CHECK(cfg.eps_b_grid == cfg.eps_a_grid);

    REQUIRE(cfg.seeds.size() == 10);
    CHECK(cfg.seeds.front() == 0);
    CHECK(cfg.seeds.back() == 9);
}

TEST_CASE("json config parsing") {
    const std::string path = write_config("full", R"({
        "dataset": {"preset": "ipinyou-like", "seed": 3, "T": 40, "n_advertisers": 4},
        "simulation": {"T": 25, "warmup_rounds": 2, "full_fit_every": 5,
                       "bernoulli": true, "risk_alpha": 0.5},
        "sweep": {"policies": ["nonrobust", "robust_joint"],
                  "eps_a": {"logspace": [1e-5, 1e-3, 3]},
                  "eps_b": [0.0, 1e-4],
                  "n_seeds": 4,
                  "out_prefix": "trial"}
    })");

    const RunConfig cfg = load_run_config(path);
    CHECK(cfg.dataset_preset == "ipinyou-like");
    CHECK(cfg.dataset_seed == 3);
    CHECK(cfg.dataset.T == 40);
    CHECK(cfg.dataset.n_advertisers == 4);
    CHECK(cfg.T == 25);
    CHECK(cfg.warmup_rounds == 2);
    CHECK(cfg.full_fit_every == 5);
    CHECK(cfg.bernoulli);
    CHECK(cfg.risk_alpha == 0.5);
    REQUIRE(cfg.policies.size() == 2);
    CHECK(cfg.policies[1] == PolicyKind::RobustJoint);
    REQUIRE(cfg.eps_a_grid.size() == 3);
    CHECK(cfg.eps_a_grid.front() == 1e-5);
    CHECK(cfg.eps_a_grid.back() == 1e-3);
    CHECK(cfg.eps_b_grid == std::vector<double>{0.0, 1e-4});
    CHECK(cfg.seeds == std::vector<std::uint64_t>{0, 1, 2, 3});
    CHECK(cfg.out_prefix == "trial");
    std::remove(path.c_str());
}

TEST_CASE("csv dataset section switches to replay") {
    const std::string path = write_config("csv", R"({
        "dataset": {"path": "rounds.csv", "smoothing": "kde", "kde_bandwidth": 0.05},
        "sweep": {"policies": ["risk"], "eps_a": 1e-4, "eps_b": 0.0, "seeds": [11]}
    })");
    const RunConfig cfg = load_run_config(path);
    CHECK(cfg.dataset_preset.empty());
    CHECK(cfg.dataset.path == "rounds.csv");
    CHECK(cfg.dataset.kind == DatasetKind::CsvSmoothed);
    CHECK(cfg.dataset.kde_bandwidth == 0.05);
    CHECK(cfg.eps_a_grid == std::vector<double>{1e-4});
    CHECK(cfg.seeds == std::vector<std::uint64_t>{11});
    std::remove(path.c_str());
}

TEST_CASE("config errors name the offending key") {
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_run_config("no_such_config.json"), std::runtime_error);
    }
    SUBCASE("unknown policy") {
        const std::string path = write_config("badpolicy", R"({
            "sweep": {"policies": ["gsp"], "eps_a": 1e-4, "eps_b": 1e-4, "n_seeds": 1}
        })");
        CHECK_THROWS_WITH_AS(load_run_config(path), doctest::Contains("unknown policy"),
                             std::runtime_error);
        std::remove(path.c_str());
    }
    SUBCASE("negative epsilon grid") {
        const std::string path = write_config("badgrid", R"({
            "sweep": {"policies": ["risk"], "eps_a": [-1.0], "eps_b": 1e-4, "n_seeds": 1}
        })");
        CHECK_THROWS_WITH_AS(load_run_config(path), doctest::Contains("config:"),
                             std::runtime_error);
        std::remove(path.c_str());
    }
    SUBCASE("malformed json") {
        const std::string path = write_config("badjson", "{ not json");
        CHECK_THROWS_AS(load_run_config(path), std::runtime_error);
        std::remove(path.c_str());
    }
}
