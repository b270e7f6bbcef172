#include "robustbid/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "robustbid/format.hpp"

namespace robustbid {

const char* to_string(DatasetKind kind) {
    switch (kind) {
        case DatasetKind::Synthetic: return "synthetic";
        case DatasetKind::CsvReplay: return "csv_replay";
        case DatasetKind::CsvSmoothed: return "csv_smoothed";
    }
    return "unknown";
}

BidSampler::BidSampler(std::vector<double> raw, double bandwidth, std::uint64_t seed)
    : raw_(std::move(raw)), bandwidth_(bandwidth), rng_(seed) {
    if (raw_.empty()) throw std::invalid_argument("bid sampler needs a non-empty pool");
    if (bandwidth_ < 0.0) {
        double mean = 0.0;
        for (double b : raw_) mean += b;
        mean /= static_cast<double>(raw_.size());
        double var = 0.0;
        for (double b : raw_) var += (b - mean) * (b - mean);
        if (raw_.size() > 1) var /= static_cast<double>(raw_.size() - 1);
        const double sd = std::sqrt(var);
        bandwidth_ = std::max(1.06 * sd * std::pow(static_cast<double>(raw_.size()), -0.2), 1e-6);
    }
}

double BidSampler::sample() {
    const std::size_t idx =
        std::min<std::size_t>(static_cast<std::size_t>(rng_.uniform() * raw_.size()),
                              raw_.size() - 1);
    const double jitter = bandwidth_ > 0.0 ? bandwidth_ * rng_.normal() : 0.0;
    return std::max(0.0, raw_[idx] + jitter);
}

BidSampler smooth_bid_distribution(const std::vector<double>& raw_bids, double bandwidth,
                                   std::uint64_t seed) {
    return BidSampler(raw_bids, bandwidth, seed);
}

namespace {

void check_range(const RateRange& r, const char* what) {
    if (!(r.low > 0.0) || !(r.high <= 1.0) || !(r.low <= r.high)) {
        throw std::invalid_argument(std::string(what) + " range must satisfy 0 < low <= high <= 1");
    }
}

}  // namespace

Dataset generate_synthetic(const DatasetSpec& spec, std::uint64_t seed) {
    if (spec.T < 1) throw std::invalid_argument("dataset needs T >= 1");
    if (spec.n_advertisers < 1) throw std::invalid_argument("dataset needs n_advertisers >= 1");
    check_range(spec.ctr_range, "ctr");
    check_range(spec.cvr_range, "cvr");

    Rng rng(seed);
    Dataset ds;
    ds.kind = DatasetKind::Synthetic;
    ds.name = "synthetic";
    const int n = spec.n_advertisers;
    ds.advertiser_ids.resize(n);
    for (int i = 0; i < n; ++i) ds.advertiser_ids[i] = i;
    ds.budgets.resize(n);
    ds.cpc_caps.assign(n, spec.cpc_cap);
    const bool budget_band = spec.budget_high > spec.budget_low && spec.budget_low > 0.0;
    for (int i = 0; i < n; ++i) {
        ds.budgets[i] = budget_band
                            ? std::exp(rng.uniform(std::log(spec.budget_low),
                                                   std::log(spec.budget_high)))
                            : spec.budget;
    }

    ds.rounds.resize(spec.T);
    for (int t = 0; t < spec.T; ++t) {
        AuctionRound& round = ds.rounds[t];
        round.t = t;
        round.ctr_true.resize(n);
        round.cvr_true.resize(n);
        double max_ctr = 0.0;
        for (int i = 0; i < n; ++i) {
            round.ctr_true[i] = rng.uniform_open_low(spec.ctr_range.low, spec.ctr_range.high);
            round.cvr_true[i] = rng.uniform_open_low(spec.cvr_range.low, spec.cvr_range.high);
            max_ctr = std::max(max_ctr, round.ctr_true[i]);
        }
        round.ctr_pred = round.ctr_true;
        round.cvr_pred = round.cvr_true;
        round.competitor_bids = {rng.uniform_open_low(0.0, max_ctr * spec.cpc_cap)};
    }
    return ds;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string token;
    while (std::getline(ss, token, ',')) {
        const auto begin = token.find_first_not_of(" \t\r");
        if (begin == std::string::npos) {
            out.emplace_back();
        } else {
            const auto end = token.find_last_not_of(" \t\r");
            out.push_back(token.substr(begin, end - begin + 1));
        }
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

struct CsvRow {
    int t = 0;
    int advertiser_id = 0;
    double ctr_true = 0.0;
    double cvr_true = 0.0;
    double ctr_pred = 0.0;
    double cvr_pred = 0.0;
    double competitor_bid = 0.0;
    double budget = 0.0;
    double cpc_cap = 0.0;
};

[[noreturn]] void row_error(const std::string& path, std::size_t row, const std::string& what) {
    throw std::runtime_error(path + ":row " + std::to_string(row) + ": " + what);
}

double parse_number(const std::string& token, const std::string& path, std::size_t row,
                    const char* column) {
    try {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        row_error(path, row, std::string("cannot parse number in column ") + column);
    }
}

}  // namespace

Dataset load_csv(const DatasetSpec& spec) {
    std::ifstream in(spec.path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + spec.path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(spec.path + ": empty dataset file");
    const std::vector<std::string> header = split_csv_line(line);
    std::unordered_map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;

    const char* required[] = {"t",       "advertiser_id", "ctr_true", "cvr_true",
                              "competitor_bid", "budget",  "cpc_cap"};
    for (const char* name : required) {
        if (!col.count(name))
            throw std::runtime_error(spec.path + ": missing required column " + name);
    }
    const bool has_ctr_pred = col.count("ctr_pred") > 0;
    const bool has_cvr_pred = col.count("cvr_pred") > 0;

    auto field = [&](const std::vector<std::string>& tokens, const char* name,
                     std::size_t row) -> const std::string& {
        const std::size_t idx = col.at(name);
        if (idx >= tokens.size()) row_error(spec.path, row, std::string("missing column ") + name);
        return tokens[idx];
    };

    std::map<int, std::vector<CsvRow>> by_t;
    std::size_t row_idx = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        ++row_idx;
        const std::vector<std::string> tokens = split_csv_line(line);
        CsvRow r;
        r.t = static_cast<int>(parse_number(field(tokens, "t", row_idx), spec.path, row_idx, "t"));
        r.advertiser_id = static_cast<int>(parse_number(field(tokens, "advertiser_id", row_idx),
                                                        spec.path, row_idx, "advertiser_id"));
        r.ctr_true = parse_number(field(tokens, "ctr_true", row_idx), spec.path, row_idx, "ctr_true");
        r.cvr_true = parse_number(field(tokens, "cvr_true", row_idx), spec.path, row_idx, "cvr_true");
        r.ctr_pred = has_ctr_pred ? parse_number(field(tokens, "ctr_pred", row_idx), spec.path,
                                                 row_idx, "ctr_pred")
                                  : r.ctr_true;
        r.cvr_pred = has_cvr_pred ? parse_number(field(tokens, "cvr_pred", row_idx), spec.path,
                                                 row_idx, "cvr_pred")
                                  : r.cvr_true;
        r.competitor_bid = parse_number(field(tokens, "competitor_bid", row_idx), spec.path,
                                        row_idx, "competitor_bid");
        r.budget = parse_number(field(tokens, "budget", row_idx), spec.path, row_idx, "budget");
        r.cpc_cap = parse_number(field(tokens, "cpc_cap", row_idx), spec.path, row_idx, "cpc_cap");

        for (const auto& [value, name] : {std::pair<double, const char*>{r.ctr_true, "ctr_true"},
                                          {r.cvr_true, "cvr_true"},
                                          {r.ctr_pred, "ctr_pred"},
                                          {r.cvr_pred, "cvr_pred"}}) {
            if (value < 0.0 || value > 1.0)
                row_error(spec.path, row_idx, std::string(name) + " outside [0, 1]");
        }
        if (r.competitor_bid < 0.0) row_error(spec.path, row_idx, "negative competitor_bid");
        if (r.budget < 0.0) row_error(spec.path, row_idx, "negative budget");
        if (r.cpc_cap < 0.0) row_error(spec.path, row_idx, "negative cpc_cap");
        by_t[r.t].push_back(r);
    }
    if (by_t.empty()) throw std::runtime_error(spec.path + ": no data rows");

    // The first round fixes the advertiser roster; every other round must
    // carry exactly the same ids.
    Dataset ds;
    ds.kind = spec.kind == DatasetKind::Synthetic ? DatasetKind::CsvReplay : spec.kind;
    ds.name = spec.path;
    {
        std::vector<CsvRow>& first = by_t.begin()->second;
        std::sort(first.begin(), first.end(),
                  [](const CsvRow& a, const CsvRow& b) { return a.advertiser_id < b.advertiser_id; });
        for (const CsvRow& r : first) {
            ds.advertiser_ids.push_back(r.advertiser_id);
            ds.budgets.push_back(r.budget);
            ds.cpc_caps.push_back(r.cpc_cap);
        }
    }
    const std::size_t n = ds.advertiser_ids.size();

    for (auto& [t, rows] : by_t) {
        std::sort(rows.begin(), rows.end(),
                  [](const CsvRow& a, const CsvRow& b) { return a.advertiser_id < b.advertiser_id; });
        if (rows.size() != n)
            throw std::runtime_error(spec.path + ": round " + std::to_string(t) +
                                     " has a different advertiser count");
        AuctionRound round;
        round.t = t;
        round.ctr_true.resize(n);
        round.cvr_true.resize(n);
        round.ctr_pred.resize(n);
        round.cvr_pred.resize(n);
        std::vector<double> competitor(n);
        for (std::size_t i = 0; i < n; ++i) {
            const CsvRow& r = rows[i];
            if (r.advertiser_id != ds.advertiser_ids[i])
                throw std::runtime_error(spec.path + ": round " + std::to_string(t) +
                                         " has a different advertiser roster");
            if (std::abs(r.budget - ds.budgets[i]) > 1e-12 ||
                std::abs(r.cpc_cap - ds.cpc_caps[i]) > 1e-12)
                throw std::runtime_error(spec.path + ": advertiser " +
                                         std::to_string(r.advertiser_id) +
                                         " changes budget or cpc_cap at round " + std::to_string(t));
            round.ctr_true[i] = r.ctr_true;
            round.cvr_true[i] = r.cvr_true;
            round.ctr_pred[i] = r.ctr_pred;
            round.cvr_pred[i] = r.cvr_pred;
            competitor[i] = r.competitor_bid;
        }
        // A constant competitor column collapses to the single exogenous bid
        // it denotes; heterogeneous values are kept as distinct competitors.
        const bool uniform = std::all_of(competitor.begin(), competitor.end(),
                                         [&](double b) { return b == competitor.front(); });
        if (uniform) {
            round.competitor_bids = {competitor.front()};
        } else {
            round.competitor_bids = std::move(competitor);
        }
        ds.rounds.push_back(std::move(round));
    }
    return ds;
}

void write_dataset_csv(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write dataset file: " + path);
    out << "t,advertiser_id,ctr_true,cvr_true,ctr_pred,cvr_pred,competitor_bid,budget,cpc_cap\n";
    const std::size_t n = dataset.advertiser_ids.size();
    for (const AuctionRound& round : dataset.rounds) {
        for (std::size_t i = 0; i < n; ++i) {
            double competitor = 0.0;
            if (round.competitor_bids.size() == 1) {
                competitor = round.competitor_bids[0];
            } else if (round.competitor_bids.size() == n) {
                competitor = round.competitor_bids[i];
            } else {
                throw std::runtime_error("round " + std::to_string(round.t) +
                                         " has an unserializable competitor bid count");
            }
            out << round.t << ',' << dataset.advertiser_ids[i] << ','
                << format_double(round.ctr_true[i]) << ',' << format_double(round.cvr_true[i])
                << ',' << format_double(round.ctr_pred[i]) << ','
                << format_double(round.cvr_pred[i]) << ',' << format_double(competitor) << ','
                << format_double(dataset.budgets[i]) << ',' << format_double(dataset.cpc_caps[i])
                << '\n';
        }
    }
}

void apply_kde_competitors(Dataset& dataset, double bandwidth, std::uint64_t seed) {
    std::vector<double> pool;
    for (const AuctionRound& round : dataset.rounds)
        pool.insert(pool.end(), round.competitor_bids.begin(), round.competitor_bids.end());
    BidSampler sampler = smooth_bid_distribution(pool, bandwidth, seed);
    for (AuctionRound& round : dataset.rounds)
        for (double& bid : round.competitor_bids) bid = sampler.sample();
    dataset.kind = DatasetKind::CsvSmoothed;
}

DatasetSpec preset_spec(std::string_view name) {
    DatasetSpec spec;
    if (name == "synthetic") {
        spec.T = 100;
        spec.n_advertisers = 10;
        spec.ctr_range = {0.01, 0.1};
        spec.cvr_range = {0.01, 0.1};
        spec.budget = 1.0;
        spec.cpc_cap = 1.0;
    } else if (name == "ipinyou-like") {
        spec.T = 500;
        spec.n_advertisers = 10;
        spec.ctr_range = {0.001, 0.05};
        spec.cvr_range = {0.01, 0.2};
        spec.budget = 500.0;
        spec.cpc_cap = 500.0;
    } else if (name == "bat-like") {
        spec.T = 500;
        spec.n_advertisers = 10;
        spec.ctr_range = {0.0017, 0.63};
        spec.cvr_range = {0.001, 0.3};
        spec.cpc_cap = 300.0;
        spec.budget_low = 4.0;
        spec.budget_high = 6700.0;
    } else {
        throw std::invalid_argument("unknown dataset preset: " + std::string(name));
    }
    return spec;
}

Dataset generate_preset(std::string_view name, std::uint64_t seed) {
    const DatasetSpec spec = preset_spec(name);
    Dataset ds = generate_synthetic(spec, seed);
    ds.name = std::string(name);
    if (name == "ipinyou-like") {
        // Competitor prices come from a smoothed heavy-tailed pool instead of
        // the per-round uniform rule, mimicking a replayed exchange stream.
        Rng rng(mix_seed(seed, 0xb1d5));
        std::vector<double> pool(200);
        for (double& b : pool) b = std::exp(std::log(5.0) + 0.75 * rng.normal());
        BidSampler sampler = smooth_bid_distribution(pool, -1.0, mix_seed(seed, 0x5a3f));
        for (AuctionRound& round : ds.rounds)
            for (double& bid : round.competitor_bids) bid = sampler.sample();
    }
    return ds;
}

}  // namespace robustbid
