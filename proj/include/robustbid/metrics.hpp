#pragma once

#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include "robustbid/types.hpp"

namespace robustbid {

// Total conversion value over every campaign and round, recomputed from the
// win log: sum of x * ctr_true * cvr_true.
double tcv(const SimulationState& state);

// Total submitted spend on won auctions divided by total expected clicks;
// absent when nothing was clicked.
std::optional<double> cpc_avg(const SimulationState& state);

struct CellKey {
    PolicyKind policy = PolicyKind::NonRobust;
    double eps_a = 0.0;
    double eps_b = 0.0;

    bool operator<(const CellKey& other) const {
        return std::tie(policy, eps_a, eps_b) < std::tie(other.policy, other.eps_a, other.eps_b);
    }
};

// Cross-seed aggregates for one (policy, eps_a, eps_b) grid cell. Sample std
// uses the n-1 denominator and is 0 for a single seed. CPC statistics cover
// only the seeds where cpc_avg was defined and are absent if there were none.
struct CellStats {
    double mean_tcv = 0.0;
    double std_tcv = 0.0;
    std::optional<double> mean_cpc;
    std::optional<double> std_cpc;
    int n_seeds = 0;
    int n_flagged = 0;
};

std::map<CellKey, CellStats> aggregate(const std::vector<SweepResult>& results);

}  // namespace robustbid
