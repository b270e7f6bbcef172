#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace robustbid {

// Probabilities indexed by timestep (or by campaign, depending on context).
using RateVector = std::vector<double>;

inline constexpr int kNoWinner = -1;

enum class PolicyKind { NonRobust, Risk, RobustCtr, RobustCvr, RobustJoint };

const char* to_string(PolicyKind kind);
std::optional<PolicyKind> parse_policy(std::string_view name);

// Advertiser-side configuration. eps_a / eps_b are uncertainty budgets in
// half-squared-loss units: the feasible rate set around a prediction r_hat is
// { r : 0.5 * ||r - r_hat||^2 <= eps }, a ball of radius sqrt(2 * eps).
struct Campaign {
    int id = 0;
    double budget = 0.0;      // B, total spend cap over the horizon
    double cpc_cap = 0.0;     // C, cap on spend per expected click
    PolicyKind policy = PolicyKind::NonRobust;
    double eps_a = 0.0;       // CTR uncertainty budget
    double eps_b = 0.0;       // CVR uncertainty budget
    double risk_alpha = 1.0;  // std multiplier, Risk policy only
};

// One auction: per-campaign true and predicted rates plus exogenous bids.
// winning_price is filled once the auction clears and equals the highest bid
// submitted by anyone (first-price rule).
struct AuctionRound {
    int t = 0;
    RateVector ctr_true;
    RateVector cvr_true;
    RateVector ctr_pred;
    RateVector cvr_pred;
    std::vector<double> competitor_bids;
    double winning_price = 0.0;
};

// Multipliers of the budget (p) and the CPC (q) constraints. The robust
// fitters use the cone names gamma / u0 internally; the mapping back is
// p = gamma, q = u0. lambda_a / lambda_b parameterize the joint-uncertainty
// certificate and are meaningful only for the RobustJoint policy.
struct DualVars {
    double p = 0.0;
    double q = 0.0;
    double lambda_a = 0.0;
    double lambda_b = 0.0;
};

// One finished auction as the simulator remembers it. `wins` is the binary
// allocation x_t per campaign; `charged` is what the winner actually paid
// (min of its bid and its remaining budget).
struct CompletedRound {
    AuctionRound round;
    std::vector<double> bids;
    std::vector<char> wins;
    int winner = kNoWinner;
    double charged = 0.0;
};

struct SimulationState {
    std::vector<Campaign> campaigns;
    std::vector<double> spend;
    std::vector<double> remaining_budget;
    std::vector<double> expected_clicks;       // sum of x * ctr_true
    std::vector<double> expected_conversions;  // sum of x * ctr_true * cvr_true
    std::vector<double> won_bid_total;         // sum of x * bid (metric numerator)
    std::vector<long> clicks_sampled;          // bernoulli mode only
    std::vector<long> conversions_sampled;
    std::vector<CompletedRound> history;
    std::vector<std::string> flags;  // distinct run-level flags, sorted
    // Largest observed spend - budget excess; stays 0 unless accounting breaks.
    double max_budget_violation = 0.0;

    void add_flag(const std::string& flag);
};

// One simulated run, in the shape of the long-form result CSV.
struct SweepResult {
    PolicyKind policy = PolicyKind::NonRobust;
    double eps_a = 0.0;
    double eps_b = 0.0;
    std::uint64_t seed = 0;
    double tcv = 0.0;
    std::optional<double> cpc_avg;  // absent when nothing was clicked
    double spend_total = 0.0;
    double clicks_expected = 0.0;
    std::vector<std::string> flags;
};

// Throws std::invalid_argument naming `what` and the offending index.
void validate_rates(const RateVector& rates, const char* what);

}  // namespace robustbid
