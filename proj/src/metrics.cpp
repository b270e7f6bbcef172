#include "robustbid/metrics.hpp"

#include <cmath>

namespace robustbid {

double tcv(const SimulationState& state) {
    double total = 0.0;
    for (const CompletedRound& cr : state.history) {
        for (std::size_t i = 0; i < cr.wins.size(); ++i) {
            if (!cr.wins[i]) continue;
            total += cr.round.ctr_true[i] * cr.round.cvr_true[i];
        }
    }
    return total;
}

std::optional<double> cpc_avg(const SimulationState& state) {
    double spend = 0.0;
    double clicks = 0.0;
    for (const CompletedRound& cr : state.history) {
        for (std::size_t i = 0; i < cr.wins.size(); ++i) {
            if (!cr.wins[i]) continue;
            spend += cr.bids[i];
            clicks += cr.round.ctr_true[i];
        }
    }
    if (clicks <= 0.0) return std::nullopt;
    return spend / clicks;
}

namespace {

struct Online {
    double sum = 0.0;
    double sum_sq = 0.0;
    int n = 0;

    void add(double v) {
        sum += v;
        sum_sq += v * v;
        ++n;
    }
    double mean() const { return n > 0 ? sum / n : 0.0; }
    double sample_std() const {
        if (n < 2) return 0.0;
        const double m = mean();
        // Guard the subtraction against cancellation noise.
        return std::sqrt(std::max(0.0, (sum_sq - n * m * m) / (n - 1)));
    }
};

}  // namespace

std::map<CellKey, CellStats> aggregate(const std::vector<SweepResult>& results) {
    struct Acc {
        Online tcv;
        Online cpc;
        int n_flagged = 0;
    };
    std::map<CellKey, Acc> cells;
    for (const SweepResult& r : results) {
        Acc& acc = cells[CellKey{r.policy, r.eps_a, r.eps_b}];
        acc.tcv.add(r.tcv);
        if (r.cpc_avg) acc.cpc.add(*r.cpc_avg);
        if (!r.flags.empty()) ++acc.n_flagged;
    }

    std::map<CellKey, CellStats> out;
    for (const auto& [key, acc] : cells) {
        CellStats stats;
        stats.mean_tcv = acc.tcv.mean();
        stats.std_tcv = acc.tcv.sample_std();
        if (acc.cpc.n > 0) {
            stats.mean_cpc = acc.cpc.mean();
            stats.std_cpc = acc.cpc.sample_std();
        }
        stats.n_seeds = acc.tcv.n;
        stats.n_flagged = acc.n_flagged;
        out.emplace(key, stats);
    }
    return out;
}

}  // namespace robustbid
