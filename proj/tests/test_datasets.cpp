#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "robustbid/datasets.hpp"

using namespace robustbid;

namespace {

std::string temp_path(const char* stem) {
    return std::string("robustbid_test_") + stem + ".csv";
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    out << body;
}

bool message_contains(const std::exception& e, const std::string& needle) {
    return std::string(e.what()).find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("synthetic preset shape and ranges") {
    const Dataset ds = generate_preset("synthetic", 42);
    CHECK(ds.kind == DatasetKind::Synthetic);
    CHECK(ds.rounds.size() == 100);
    CHECK(ds.advertiser_ids.size() == 10);
    for (double b : ds.budgets) CHECK(b == 1.0);
    for (double c : ds.cpc_caps) CHECK(c == 1.0);

    for (const AuctionRound& round : ds.rounds) {
        double max_ctr = 0.0;
        for (std::size_t i = 0; i < 10; ++i) {
            CHECK(round.ctr_true[i] > 0.01);
            CHECK(round.ctr_true[i] <= 0.1);
            CHECK(round.cvr_true[i] > 0.01);
            CHECK(round.cvr_true[i] <= 0.1);
            CHECK(round.ctr_pred[i] == round.ctr_true[i]);
            CHECK(round.cvr_pred[i] == round.cvr_true[i]);
            max_ctr = std::max(max_ctr, round.ctr_true[i]);
        }
        REQUIRE(round.competitor_bids.size() == 1);
        CHECK(round.competitor_bids[0] > 0.0);
        CHECK(round.competitor_bids[0] <= max_ctr);
    }

    // Same seed, same bytes; different seed, different draws.
    const Dataset again = generate_preset("synthetic", 42);
    CHECK(again.rounds[7].ctr_true == ds.rounds[7].ctr_true);
    const Dataset other = generate_preset("synthetic", 43);
    CHECK(other.rounds[7].ctr_true != ds.rounds[7].ctr_true);
}

TEST_CASE("named presets carry their documented parameters") {
    const DatasetSpec ipinyou = preset_spec("ipinyou-like");
    CHECK(ipinyou.T == 500);
    CHECK(ipinyou.budget == 500.0);
    CHECK(ipinyou.cpc_cap == 500.0);

    const DatasetSpec bat = preset_spec("bat-like");
    CHECK(bat.ctr_range.low == 0.0017);
    CHECK(bat.ctr_range.high == 0.63);
    CHECK(bat.budget_low == 4.0);
    CHECK(bat.budget_high == 6700.0);
    CHECK(bat.cpc_cap == 300.0);

    const Dataset bat_ds = generate_preset("bat-like", 7);
    for (double b : bat_ds.budgets) {
        CHECK(b >= 4.0);
        CHECK(b <= 6700.0);
    }

    CHECK_THROWS_AS(preset_spec("unknown"), std::invalid_argument);
}

TEST_CASE("degenerate rate range pins every draw") {
    DatasetSpec spec;
    spec.T = 5;
    spec.n_advertisers = 3;
    spec.ctr_range = {0.07, 0.07};
    spec.cvr_range = {0.02, 0.02};
    const Dataset ds = generate_synthetic(spec, 1);
    for (const AuctionRound& round : ds.rounds)
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(round.ctr_true[i] == 0.07);
            CHECK(round.cvr_true[i] == 0.02);
        }
}

TEST_CASE("bid sampler") {
    SUBCASE("zero bandwidth resamples the pool exactly") {
        BidSampler s({1.5, 2.5, 4.0}, 0.0, 9);
        for (int i = 0; i < 100; ++i) {
            const double v = s.sample();
            CHECK((v == 1.5 || v == 2.5 || v == 4.0));
        }
    }
    SUBCASE("jittered mean matches the pool mean") {
        BidSampler s({2.0, 3.0}, 0.1, 9);
        double sum = 0.0;
        const int n = 100000;
        for (int i = 0; i < n; ++i) {
            const double v = s.sample();
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(sum / n == doctest::Approx(2.5).epsilon(0.004));
    }
    SUBCASE("automatic bandwidth follows the reference rule") {
        BidSampler s({2.0, 3.0}, -1.0, 9);
        const double sd = std::sqrt(0.5);
        CHECK(s.bandwidth() ==
              doctest::Approx(1.06 * sd * std::pow(2.0, -0.2)).epsilon(1e-12));

        BidSampler degenerate({5.0, 5.0}, -1.0, 9);
        CHECK(degenerate.bandwidth() == 1e-6);
    }
    SUBCASE("empty pool is rejected") {
        CHECK_THROWS_AS(BidSampler({}, 0.1, 9), std::invalid_argument);
    }
}

TEST_CASE("csv write and load round-trip") {
    const Dataset ds = generate_preset("synthetic", 5);
    const std::string path = temp_path("roundtrip");
    write_dataset_csv(ds, path);

    DatasetSpec spec;
    spec.kind = DatasetKind::CsvReplay;
    spec.path = path;
    const Dataset back = load_csv(spec);
    CHECK(back.kind == DatasetKind::CsvReplay);
    REQUIRE(back.rounds.size() == ds.rounds.size());
    CHECK(back.advertiser_ids == ds.advertiser_ids);
    CHECK(back.budgets == ds.budgets);
    CHECK(back.cpc_caps == ds.cpc_caps);
    for (std::size_t t = 0; t < ds.rounds.size(); ++t) {
        CHECK(back.rounds[t].ctr_true == ds.rounds[t].ctr_true);
        CHECK(back.rounds[t].cvr_true == ds.rounds[t].cvr_true);
        CHECK(back.rounds[t].ctr_pred == ds.rounds[t].ctr_pred);
        CHECK(back.rounds[t].cvr_pred == ds.rounds[t].cvr_pred);
        CHECK(back.rounds[t].competitor_bids == ds.rounds[t].competitor_bids);
    }
    std::remove(path.c_str());
}

TEST_CASE("csv loader validation") {
    const std::string header =
        "t,advertiser_id,ctr_true,cvr_true,ctr_pred,cvr_pred,competitor_bid,budget,cpc_cap\n";
    DatasetSpec spec;
    spec.kind = DatasetKind::CsvReplay;

    SUBCASE("out-of-range rate names the offending row") {
        std::string body = header;
        for (int r = 1; r <= 6; ++r)
            body += std::to_string(r - 1) + ",0,0.1,0.1,0.1,0.1,0.5,1,1\n";
        body += "6,0,1.5,0.1,0.1,0.1,0.5,1,1\n";
        spec.path = temp_path("badrate");
        write_file(spec.path, body);
        CHECK_THROWS_WITH_AS(load_csv(spec), doctest::Contains("row 7"), std::runtime_error);
        std::remove(spec.path.c_str());
    }
    SUBCASE("missing prediction columns fall back to the truth") {
        spec.path = temp_path("nopred");
        write_file(spec.path,
                   "t,advertiser_id,ctr_true,cvr_true,competitor_bid,budget,cpc_cap\n"
                   "0,0,0.2,0.3,0.5,1,1\n");
        const Dataset ds = load_csv(spec);
        CHECK(ds.rounds[0].ctr_pred[0] == 0.2);
        CHECK(ds.rounds[0].cvr_pred[0] == 0.3);
        std::remove(spec.path.c_str());
    }
    SUBCASE("missing required column is fatal") {
        spec.path = temp_path("nocol");
        write_file(spec.path, "t,advertiser_id,ctr_true,cvr_true,competitor_bid,budget\n");
        try {
            load_csv(spec);
            FAIL("expected a runtime_error");
        } catch (const std::runtime_error& e) {
            CHECK(message_contains(e, "missing required column"));
            CHECK(message_contains(e, "cpc_cap"));
        }
        std::remove(spec.path.c_str());
    }
    SUBCASE("unreadable path is fatal") {
        spec.path = "does_not_exist_anywhere.csv";
        CHECK_THROWS_AS(load_csv(spec), std::runtime_error);
    }
}

TEST_CASE("kde smoothing replaces competitors deterministically") {
    Dataset a = generate_preset("synthetic", 11);
    Dataset b = generate_preset("synthetic", 11);
    apply_kde_competitors(a, 0.05, 21);
    apply_kde_competitors(b, 0.05, 21);
    CHECK(a.kind == DatasetKind::CsvSmoothed);
    for (std::size_t t = 0; t < a.rounds.size(); ++t)
        CHECK(a.rounds[t].competitor_bids == b.rounds[t].competitor_bids);

    Dataset c = generate_preset("synthetic", 11);
    apply_kde_competitors(c, 0.05, 22);
    bool differs = false;
    for (std::size_t t = 0; t < a.rounds.size() && !differs; ++t)
        differs = a.rounds[t].competitor_bids != c.rounds[t].competitor_bids;
    CHECK(differs);
}
