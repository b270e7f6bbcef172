#include "robustbid/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "robustbid/bidding.hpp"
#include "robustbid/metrics.hpp"
#include "robustbid/uncertainty.hpp"

namespace robustbid {

int run_auction(const std::vector<double>& bids) {
    int winner = kNoWinner;
    double best = 0.0;
    for (std::size_t i = 0; i < bids.size(); ++i) {
        if (bids[i] < 0.0) throw std::invalid_argument("negative bid submitted to auction");
        if (bids[i] > best) {
            best = bids[i];
            winner = static_cast<int>(i);
        }
    }
    return winner;
}

void charge(SimulationState& state, int winner, double bid) {
    if (winner < 0 || winner >= static_cast<int>(state.spend.size()))
        throw std::invalid_argument("charge called with an invalid winner");
    double& remaining = state.remaining_budget[winner];
    const double pay = std::min(bid, remaining);
    state.spend[winner] += pay;
    remaining -= pay;
    if (remaining < 0.0) remaining = 0.0;
    const double excess =
        state.spend[winner] - state.campaigns[winner].budget;
    state.max_budget_violation = std::max(state.max_budget_violation, excess);
    if (excess > 1e-9) state.add_flag("budget_violation");
}

Simulator::Simulator(const SimulationConfig& config, const Dataset& dataset)
    : cfg_(config), outcome_rng_(mix_seed(config.seed, 0xbe77)) {
    if (cfg_.T < 1) throw std::invalid_argument("simulation needs T >= 1");
    if (cfg_.campaigns.empty()) throw std::invalid_argument("simulation needs campaigns");
    if (static_cast<int>(dataset.rounds.size()) < cfg_.T)
        throw std::invalid_argument("dataset shorter than simulation horizon");
    const std::size_t n = cfg_.campaigns.size();
    for (const AuctionRound& r : dataset.rounds) {
        if (r.ctr_true.size() < n || r.cvr_true.size() < n)
            throw std::invalid_argument("dataset carries fewer advertisers than campaigns");
    }

    rounds_.assign(dataset.rounds.begin(), dataset.rounds.begin() + cfg_.T);
    for (AuctionRound& r : rounds_) {
        if (r.ctr_pred.size() != r.ctr_true.size()) r.ctr_pred = r.ctr_true;
        if (r.cvr_pred.size() != r.cvr_true.size()) r.cvr_pred = r.cvr_true;
    }

    // Prediction noise: one ball-bounded perturbation per campaign and rate
    // series, so the injected loss matches the sweep's epsilon exactly.
    for (std::size_t i = 0; i < n; ++i) {
        if (cfg_.eps_a > 0.0) {
            RateVector series(rounds_.size());
            for (std::size_t t = 0; t < rounds_.size(); ++t) series[t] = rounds_[t].ctr_true[i];
            const RateVector noised =
                perturb_rates(series, cfg_.eps_a, mix_seed(cfg_.seed, 2 * i));
            for (std::size_t t = 0; t < rounds_.size(); ++t) rounds_[t].ctr_pred[i] = noised[t];
        }
        if (cfg_.eps_b > 0.0) {
            RateVector series(rounds_.size());
            for (std::size_t t = 0; t < rounds_.size(); ++t) series[t] = rounds_[t].cvr_true[i];
            const RateVector noised =
                perturb_rates(series, cfg_.eps_b, mix_seed(cfg_.seed, 2 * i + 1));
            for (std::size_t t = 0; t < rounds_.size(); ++t) rounds_[t].cvr_pred[i] = noised[t];
        }
    }

    state_.campaigns = cfg_.campaigns;
    state_.spend.assign(n, 0.0);
    state_.remaining_budget.resize(n);
    for (std::size_t i = 0; i < n; ++i) state_.remaining_budget[i] = cfg_.campaigns[i].budget;
    state_.expected_clicks.assign(n, 0.0);
    state_.expected_conversions.assign(n, 0.0);
    state_.won_bid_total.assign(n, 0.0);
    state_.clicks_sampled.assign(n, 0);
    state_.conversions_sampled.assign(n, 0);
    state_.history.reserve(cfg_.T);

    warmup_bids_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        warmup_bids_[i] = cfg_.warmup_bid >= 0.0
                              ? cfg_.warmup_bid
                              : 0.1 * cfg_.campaigns[i].budget / static_cast<double>(cfg_.T);
    }
    last_fit_.resize(n);
    has_fit_.assign(n, 0);
}

FitInstance Simulator::history_instance(std::size_t i) const {
    FitInstance inst;
    const std::size_t h = state_.history.size();
    inst.ctr.resize(h);
    inst.cvr.resize(h);
    inst.wp.resize(h);
    for (std::size_t j = 0; j < h; ++j) {
        const CompletedRound& cr = state_.history[j];
        inst.ctr[j] = cr.round.ctr_pred[i];
        inst.cvr[j] = cr.round.cvr_pred[i];
        inst.wp[j] = cr.round.winning_price;
    }
    // Prorate the budget to the history length: the full budget cannot bind
    // on a short in-sample horizon, which would leave p near zero and let
    // the early bid formula blow up.
    inst.budget = cfg_.campaigns[i].budget * static_cast<double>(h) /
                  static_cast<double>(std::max(cfg_.T, 1));
    inst.cpc_cap = cfg_.campaigns[i].cpc_cap;
    return inst;
}

double Simulator::policy_bid(std::size_t i, const AuctionRound& round) {
    const Campaign& c = cfg_.campaigns[i];
    if (state_.remaining_budget[i] <= 1e-12) return 0.0;
    if (t_ < cfg_.warmup_rounds) return warmup_bids_[i];

    const double ctr_hat = round.ctr_pred[i];
    const double cvr_hat = round.cvr_pred[i];
    // Rolling standard deviation of the predicted CTR over the trailing
    // history; the Risk policy's stand-in for a model-supplied predictive
    // std.
    double ctr_std = 0.0;
    if (!state_.history.empty()) {
        double mean = 0.0;
        for (const CompletedRound& cr : state_.history) mean += cr.round.ctr_pred[i];
        mean /= static_cast<double>(state_.history.size());
        double var = 0.0;
        for (const CompletedRound& cr : state_.history) {
            const double d = cr.round.ctr_pred[i] - mean;
            var += d * d;
        }
        ctr_std = std::sqrt(var / static_cast<double>(state_.history.size()));
    }

    if (state_.history.empty()) return c.cpc_cap * ctr_hat;

    FitOptions opts;
    opts.nm_max_iters = 150;
    opts.multistarts = 3;
    if (has_fit_[i]) {
        opts.warm_start = true;
        opts.start = last_fit_[i].duals;
        const int since_warmup = t_ - cfg_.warmup_rounds;
        opts.quick = cfg_.full_fit_every > 1 && since_warmup % cfg_.full_fit_every != 0;
    }

    FitResult fit;
    const FitInstance inst = history_instance(i);
    switch (c.policy) {
        case PolicyKind::NonRobust:
        case PolicyKind::Risk:
            fit = fit_duals_nonrobust(inst, opts);
            break;
        case PolicyKind::RobustCtr:
            fit = fit_duals_robust_ctr(inst, c.eps_a, opts);
            break;
        case PolicyKind::RobustCvr:
            fit = fit_duals_robust_cvr(inst, c.eps_b, opts);
            break;
        case PolicyKind::RobustJoint:
            fit = fit_duals_joint(inst, c.eps_a, c.eps_b, opts);
            break;
    }
    last_fit_[i] = fit;
    has_fit_[i] = 1;
    if (!fit.converged) state_.add_flag("fit_nonconverged");
    if (!fit.lambda_converged) state_.add_flag("lambda_nonconverged");
    if (!fit.active.converged) state_.add_flag("aset_nonconverged");

    const DualVars& duals = fit.duals;
    if (duals.p + duals.q <= 1e-9) {
        // Slack constraints: the bid formula degenerates, so bid the value
        // cap per expected click.
        const double rate = c.policy == PolicyKind::Risk
                                ? std::max(0.0, ctr_hat - c.risk_alpha * ctr_std)
                                : ctr_hat;
        return c.cpc_cap * rate;
    }

    switch (c.policy) {
        case PolicyKind::NonRobust:
            return bid_nonrobust(duals, c.cpc_cap, ctr_hat, cvr_hat);
        case PolicyKind::Risk:
            return bid_risk(duals, c.cpc_cap, ctr_hat, ctr_std, c.risk_alpha, cvr_hat);
        case PolicyKind::RobustCtr: {
            const double base = bid_nonrobust(duals, c.cpc_cap, ctr_hat, cvr_hat);
            const double delta = delta_ctr(duals, c.cpc_cap, cvr_hat, c.eps_a,
                                           fit.active.count, fit.active.sum_cvr_sq);
            return std::max(0.0, base + delta);
        }
        case PolicyKind::RobustCvr: {
            const double base = bid_nonrobust(duals, c.cpc_cap, ctr_hat, cvr_hat);
            const double delta = delta_cvr(duals, ctr_hat, c.eps_b, fit.active.sum_ctr_sq);
            return std::max(0.0, base + delta);
        }
        case PolicyKind::RobustJoint: {
            const double base = bid_nonrobust(duals, c.cpc_cap, ctr_hat, cvr_hat);
            double delta = delta_joint(duals, ctr_hat, cvr_hat, c.eps_a, fit.active.count);
            if (delta > 0.0) {
                delta = 0.0;
                state_.add_flag("delta_clamped");
            }
            return std::max(0.0, base + delta);
        }
    }
    return 0.0;
}

void Simulator::step() {
    if (t_ >= cfg_.T) throw std::logic_error("simulation already finished");
    const AuctionRound& round = rounds_[t_];
    const std::size_t n = cfg_.campaigns.size();

    std::vector<double> bids(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) bids[i] = policy_bid(i, round);

    const int campaign_winner = run_auction(bids);
    double top_competitor = 0.0;
    for (double b : round.competitor_bids) top_competitor = std::max(top_competitor, b);

    // Ties between a campaign and the exogenous stream go to the campaign;
    // among campaigns run_auction already chose the lowest id.
    int winner = kNoWinner;
    if (campaign_winner != kNoWinner && bids[campaign_winner] >= top_competitor)
        winner = campaign_winner;

    CompletedRound cr;
    cr.round = round;
    cr.round.winning_price =
        std::max(top_competitor, winner != kNoWinner ? bids[winner] : 0.0);
    cr.bids = bids;
    cr.wins.assign(n, 0);
    cr.winner = winner;
    if (winner != kNoWinner) {
        cr.wins[winner] = 1;
        const double before = state_.remaining_budget[winner];
        charge(state_, winner, bids[winner]);
        cr.charged = before - state_.remaining_budget[winner];
        state_.expected_clicks[winner] += round.ctr_true[winner];
        state_.expected_conversions[winner] +=
            round.ctr_true[winner] * round.cvr_true[winner];
        state_.won_bid_total[winner] += bids[winner];
        if (cfg_.bernoulli) {
            const bool clicked = outcome_rng_.uniform() < round.ctr_true[winner];
            if (clicked) {
                ++state_.clicks_sampled[winner];
                if (outcome_rng_.uniform() < round.cvr_true[winner])
                    ++state_.conversions_sampled[winner];
            }
        }
    }
    state_.history.push_back(std::move(cr));
    ++t_;
}

void Simulator::run() {
    while (t_ < cfg_.T) step();
}

SweepResult Simulator::result_row() const {
    SweepResult row;
    row.policy = cfg_.campaigns.front().policy;
    row.eps_a = cfg_.eps_a;
    row.eps_b = cfg_.eps_b;
    row.seed = cfg_.seed;
    row.tcv = tcv(state_);
    row.cpc_avg = cpc_avg(state_);
    row.spend_total = 0.0;
    for (double s : state_.spend) row.spend_total += s;
    row.clicks_expected = 0.0;
    for (double c : state_.expected_clicks) row.clicks_expected += c;
    row.flags = state_.flags;
    return row;
}

SimulationState run_simulation(const SimulationConfig& config, const Dataset& dataset) {
    Simulator sim(config, dataset);
    sim.run();
    return sim.state();
}

}  // namespace robustbid
