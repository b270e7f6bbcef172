#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "robustbid/rng.hpp"
#include "robustbid/types.hpp"

namespace robustbid {

enum class DatasetKind { Synthetic, CsvReplay, CsvSmoothed };

const char* to_string(DatasetKind kind);

struct RateRange {
    double low = 0.01;
    double high = 0.1;  // rates drawn uniform in (low, high]
};

struct DatasetSpec {
    DatasetKind kind = DatasetKind::Synthetic;
    int T = 100;
    int n_advertisers = 10;
    RateRange ctr_range;
    RateRange cvr_range;
    std::string path;           // csv kinds only
    double kde_bandwidth = -1.0;  // smoothed replay; < 0 means the auto rule
    double budget = 1.0;
    double cpc_cap = 1.0;
    // When high > low the per-advertiser budgets are drawn log-uniform from
    // [low, high] instead of using the flat `budget` value.
    double budget_low = 0.0;
    double budget_high = 0.0;
};

struct Dataset {
    DatasetKind kind = DatasetKind::Synthetic;
    std::string name;
    std::vector<AuctionRound> rounds;
    std::vector<int> advertiser_ids;
    std::vector<double> budgets;   // per advertiser
    std::vector<double> cpc_caps;  // per advertiser
};

// Empirical resampler with Gaussian jitter; bandwidth < 0 picks the
// 1.06 * std * n^(-1/5) rule, floored at 1e-6 so degenerate pools still mix.
// Draws are truncated at zero.
class BidSampler {
  public:
    BidSampler(std::vector<double> raw, double bandwidth, std::uint64_t seed);

    double sample();
    double bandwidth() const { return bandwidth_; }

  private:
    std::vector<double> raw_;
    double bandwidth_;
    Rng rng_;
};

BidSampler smooth_bid_distribution(const std::vector<double>& raw_bids, double bandwidth,
                                   std::uint64_t seed);

// T rounds of iid uniform rates per advertiser, predictions equal to truth
// (prediction noise is a simulation-time concern), one exogenous competitor
// bid per round drawn uniform in (0, round_max_ctr * cpc_cap].
Dataset generate_synthetic(const DatasetSpec& spec, std::uint64_t seed);

// Parses the documented CSV schema; throws std::runtime_error naming the
// offending data row on validation failures.
Dataset load_csv(const DatasetSpec& spec);

void write_dataset_csv(const Dataset& dataset, const std::string& path);

// Replaces every round's competitor bids with iid draws from a jittered
// empirical distribution of the bids already present.
void apply_kde_competitors(Dataset& dataset, double bandwidth, std::uint64_t seed);

// Named presets: synthetic, ipinyou-like, bat-like.
DatasetSpec preset_spec(std::string_view name);
Dataset generate_preset(std::string_view name, std::uint64_t seed);

}  // namespace robustbid
