#pragma once

#include <cstdint>
#include <vector>

#include "robustbid/datasets.hpp"
#include "robustbid/dual_fit.hpp"
#include "robustbid/types.hpp"

namespace robustbid {

enum class ChargeRule { MinBidBudget };

struct SimulationConfig {
    int T = 100;
    std::vector<Campaign> campaigns;
    // Prediction noise actually injected into the dataset (per campaign and
    // rate series, half-squared loss at most eps). Zero keeps the dataset's
    // own predictions. Campaigns carry their assumed eps separately.
    double eps_a = 0.0;
    double eps_b = 0.0;
    std::uint64_t seed = 0;
    ChargeRule charge_rule = ChargeRule::MinBidBudget;
    double warmup_bid = -1.0;  // < 0 picks 10% of B / T per campaign
    int warmup_rounds = 5;
    bool bernoulli = false;  // additionally sample realized clicks/conversions
    // Full multistart refit cadence; the steps in between reuse the previous
    // duals as a warm start for a cheap local refit.
    int full_fit_every = 10;
};

// Winner among campaign bids only: argmax, ties to the lowest id, kNoWinner
// when every bid is zero.
int run_auction(const std::vector<double>& bids);

// First-price charge capped by the remaining budget.
void charge(SimulationState& state, int winner, double bid);

class Simulator {
  public:
    Simulator(const SimulationConfig& config, const Dataset& dataset);

    // Runs one auction round: every campaign refits and bids on its own
    // history, the round clears against the exogenous competitors, the
    // winner is charged.
    void step();
    void run();

    int current_step() const { return t_; }
    const SimulationState& state() const { return state_; }
    const std::vector<AuctionRound>& rounds() const { return rounds_; }

    // One long-form result row covering all campaigns of this run; policy
    // and eps columns describe the first campaign (sweep runs are uniform).
    SweepResult result_row() const;

  private:
    double policy_bid(std::size_t i, const AuctionRound& round);
    FitInstance history_instance(std::size_t i) const;

    SimulationConfig cfg_;
    std::vector<AuctionRound> rounds_;  // dataset slice with injected noise
    SimulationState state_;
    std::vector<double> warmup_bids_;
    std::vector<FitResult> last_fit_;
    std::vector<char> has_fit_;
    Rng outcome_rng_;
    int t_ = 0;
};

SimulationState run_simulation(const SimulationConfig& config, const Dataset& dataset);

}  // namespace robustbid
