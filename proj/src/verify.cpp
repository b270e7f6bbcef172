#include "robustbid/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "robustbid/bidding.hpp"
#include "robustbid/datasets.hpp"
#include "robustbid/dual_fit.hpp"
#include "robustbid/metrics.hpp"
#include "robustbid/oracle.hpp"
#include "robustbid/rng.hpp"
#include "robustbid/simulator.hpp"
#include "robustbid/uncertainty.hpp"

namespace robustbid {

namespace {

std::string describe(const char* label, double value, int n) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s %.3e over %d cases", label, value, n);
    return buf;
}

double log_uniform(Rng& rng, double lo, double hi) {
    return std::pow(10.0, rng.uniform(std::log10(lo), std::log10(hi)));
}

}  // namespace

std::vector<CheckResult> verify_worst_case(int instances, std::uint64_t seed) {
    double worst_rel = 0.0;
    double worst_excess = 0.0;
    for (int i = 0; i < instances; ++i) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
        const int T = 5 + static_cast<int>(rng.uniform() * 16.0);
        RateVector pred(T);
        RateVector weights(T);
        for (double& v : pred) v = rng.uniform(0.1, 0.9);
        for (double& v : weights) v = rng.uniform(0.2, 1.5);
        const double eps = log_uniform(rng, 1e-6, 1e-3);

        const RateVector arg = worst_case_rates(pred, weights, eps);
        double analytic = 0.0;
        double dist_sq = 0.0;
        for (int t = 0; t < T; ++t) {
            analytic += weights[t] * arg[t];
            dist_sq += (arg[t] - pred[t]) * (arg[t] - pred[t]);
        }
        worst_excess = std::max(worst_excess, (0.5 * dist_sq - eps) / eps);

        const oracle::BallMinimizerResult num = oracle::numeric_ball_minimizer(pred, weights, eps);
        const double rel =
            std::abs(analytic - num.objective) / std::max(std::abs(analytic), 1e-12);
        worst_rel = std::max(worst_rel, rel);
    }
    return {
        {"worst_case.objective", worst_rel <= 1e-6,
         describe("max relative gap to the numeric minimizer", worst_rel, instances)},
        {"worst_case.in_ball", worst_excess <= 1e-9,
         describe("max relative ball excess of the analytic argmin", worst_excess, instances)},
    };
}

std::vector<CheckResult> verify_duality(int instances, std::uint64_t seed) {
    constexpr const char* kNames[4] = {"duality.nonrobust", "duality.robust_ctr",
                                       "duality.robust_cvr", "duality.robust_joint"};
    double min_slack[4];
    int counts[4] = {0, 0, 0, 0};
    std::fill(std::begin(min_slack), std::end(min_slack),
              std::numeric_limits<double>::infinity());

    for (int i = 0; i < instances; ++i) {
        Rng rng(mix_seed(seed, 100 + static_cast<std::uint64_t>(i)));
        const int mode_i = i % 4;
        const auto mode = static_cast<oracle::PrimalMode>(mode_i);
        const bool joint = mode == oracle::PrimalMode::RobustJoint;
        const int T = joint ? 3 + static_cast<int>(rng.uniform() * 6.0)
                            : 4 + static_cast<int>(rng.uniform() * 9.0);

        FitInstance inst;
        inst.ctr.resize(T);
        inst.cvr.resize(T);
        inst.wp.resize(T);
        for (int t = 0; t < T; ++t) {
            inst.ctr[t] = rng.uniform_open_low(0.05, 0.5);
            inst.cvr[t] = rng.uniform_open_low(0.05, 0.5);
            inst.wp[t] = rng.uniform(0.001, 0.08);
        }
        inst.budget = rng.uniform(0.05, 0.5);
        inst.cpc_cap = rng.uniform(0.2, 3.0);

        double eps_a = 0.0;
        double eps_b = 0.0;
        if (mode == oracle::PrimalMode::RobustCtr || joint) eps_a = log_uniform(rng, 1e-6, 1e-2);
        if (mode == oracle::PrimalMode::RobustCvr || joint) eps_b = log_uniform(rng, 1e-6, 1e-2);

        double dual = 0.0;
        switch (mode) {
            case oracle::PrimalMode::NonRobust:
                dual = fit_duals_nonrobust(inst).objective;
                break;
            case oracle::PrimalMode::RobustCtr:
                dual = fit_duals_robust_ctr(inst, eps_a).objective;
                break;
            case oracle::PrimalMode::RobustCvr:
                dual = fit_duals_robust_cvr(inst, eps_b).objective;
                break;
            case oracle::PrimalMode::RobustJoint: {
                const FitResult fit = fit_duals_joint(inst, eps_a, eps_b);
                dual = dual_certificate_joint(inst, eps_a, eps_b, fit.duals);
                break;
            }
        }

        oracle::PrimalInstance primal;
        primal.ctr = inst.ctr;
        primal.cvr = inst.cvr;
        primal.wp = inst.wp;
        primal.budget = inst.budget;
        primal.cpc_cap = inst.cpc_cap;
        primal.eps_a = eps_a;
        primal.eps_b = eps_b;
        primal.mode = mode;
        primal.seed = mix_seed(seed, 500 + static_cast<std::uint64_t>(i));
        const oracle::PrimalResult best = oracle::brute_force_primal(primal);

        min_slack[mode_i] = std::min(min_slack[mode_i], dual - best.best_value);
        ++counts[mode_i];
    }

    std::vector<CheckResult> out;
    for (int m = 0; m < 4; ++m)
        out.push_back({kNames[m], min_slack[m] >= -1e-6,
                       describe("min dual - primal slack", min_slack[m], counts[m])});
    return out;
}

std::vector<CheckResult> verify_consistency(int instances, std::uint64_t seed) {
    double worst_bid = 0.0;
    double worst_fit = 0.0;
    for (int i = 0; i < instances; ++i) {
        Rng rng(mix_seed(seed, 9000 + static_cast<std::uint64_t>(i)));
        const int T = 5 + static_cast<int>(rng.uniform() * 26.0);
        RateVector ctr(T);
        RateVector cvr(T);
        std::vector<double> wp(T);
        for (int t = 0; t < T; ++t) {
            ctr[t] = rng.uniform_open_low(0.02, 0.6);
            cvr[t] = rng.uniform_open_low(0.02, 0.6);
            wp[t] = rng.uniform(0.001, 0.1);
        }
        const double cap = rng.uniform(0.2, 3.0);

        DualVars duals;
        duals.p = rng.uniform(0.05, 2.0);
        duals.q = rng.uniform(0.05, 2.0);
        // Drawn above 0.6 so 4 * la * lb clears the margin by a wide band.
        duals.lambda_a = rng.uniform(0.6, 2.0);
        duals.lambda_b = rng.uniform(0.6, 2.0);

        const auto d_ctr = bids_robust_ctr(duals, cap, ctr, cvr, wp, 0.0);
        const auto d_cvr = bids_robust_cvr(duals, cap, ctr, cvr, wp, 0.0);
        const auto d_joint = bids_robust_joint(duals, cap, ctr, cvr, wp, 0.0, 0.0);
        for (int t = 0; t < T; ++t) {
            const double base = bid_nonrobust(duals, cap, ctr[t], cvr[t]);
            worst_bid = std::max({worst_bid, std::abs(d_ctr[t].bid - base),
                                  std::abs(d_cvr[t].bid - base), std::abs(d_joint[t].bid - base)});
        }

        FitInstance inst{ctr, cvr, wp, rng.uniform(0.05, 1.0), cap};
        const double base_fit = fit_duals_nonrobust(inst).objective;
        worst_fit = std::max(
            {worst_fit, std::abs(fit_duals_robust_ctr(inst, 0.0).objective - base_fit),
             std::abs(fit_duals_robust_cvr(inst, 0.0).objective - base_fit),
             std::abs(fit_duals_joint(inst, 0.0, 0.0).objective - base_fit)});
    }
    return {
        {"consistency.bids", worst_bid <= 1e-9,
         describe("max |robust bid - nonrobust bid| at eps = 0", worst_bid, instances)},
        {"consistency.fits", worst_fit <= 1e-6,
         describe("max fitted objective gap at eps = 0", worst_fit, instances)},
    };
}

std::vector<CheckResult> verify_psd(int triples, std::uint64_t seed) {
    int disagreements = 0;
    for (int i = 0; i < triples; ++i) {
        Rng rng(mix_seed(seed, 40000 + static_cast<std::uint64_t>(i)));
        const int T = 1 + static_cast<int>(rng.uniform() * 10.0);
        std::vector<double> x(T);
        for (double& v : x) v = rng.uniform();
        double la = rng.uniform(0.0, 2.0);
        double lb = rng.uniform(0.0, 2.0);
        // Exercise the decision boundary and the degenerate corners, not just
        // the easy interior.
        if (i % 5 == 2 && la > 1e-6) {
            const double mx = *std::max_element(x.begin(), x.end());
            lb = mx * mx / (4.0 * la) * rng.uniform(0.98, 1.02);
        }
        if (i % 7 == 3) la = 0.0;
        if (i % 11 == 4) std::fill(x.begin(), x.end(), 0.0);

        const bool matrix = oracle::psd_check(la, lb, x);
        const bool scalar = oracle::psd_scalar_condition(la, lb, x);
        if (matrix != scalar) ++disagreements;
    }
    return {{"psd.equivalence", disagreements == 0,
             describe("matrix vs scalar disagreements", disagreements, triples)}};
}

std::vector<CheckResult> verify_metrics(std::uint64_t seed) {
    std::vector<CheckResult> out;

    const Dataset dataset = generate_preset("synthetic", seed);
    SimulationConfig cfg;
    cfg.T = 40;
    cfg.seed = mix_seed(seed, 77);
    cfg.eps_a = 1e-3;
    cfg.eps_b = 1e-3;
    constexpr PolicyKind kKinds[5] = {PolicyKind::NonRobust, PolicyKind::Risk,
                                      PolicyKind::RobustCtr, PolicyKind::RobustCvr,
                                      PolicyKind::RobustJoint};
    for (std::size_t i = 0; i < dataset.budgets.size(); ++i) {
        Campaign c;
        c.id = dataset.advertiser_ids[i];
        c.budget = dataset.budgets[i];
        c.cpc_cap = dataset.cpc_caps[i];
        c.policy = kKinds[i % 5];
        c.eps_a = 1e-3;
        c.eps_b = 1e-3;
        cfg.campaigns.push_back(c);
    }
    const SimulationState st = run_simulation(cfg, dataset);

    // Recompute every accumulator from the win log.
    const std::size_t n = cfg.campaigns.size();
    std::vector<double> clicks(n, 0.0);
    std::vector<double> conv(n, 0.0);
    std::vector<double> bid_sum(n, 0.0);
    std::vector<double> spend(n, 0.0);
    for (const CompletedRound& cr : st.history) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!cr.wins[i]) continue;
            clicks[i] += cr.round.ctr_true[i];
            conv[i] += cr.round.ctr_true[i] * cr.round.cvr_true[i];
            bid_sum[i] += cr.bids[i];
        }
        if (cr.winner != kNoWinner) spend[static_cast<std::size_t>(cr.winner)] += cr.charged;
    }
    double acc_err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc_err = std::max({acc_err, std::abs(clicks[i] - st.expected_clicks[i]),
                            std::abs(conv[i] - st.expected_conversions[i]),
                            std::abs(bid_sum[i] - st.won_bid_total[i]),
                            std::abs(spend[i] - st.spend[i]),
                            std::abs(st.spend[i] + st.remaining_budget[i] -
                                     cfg.campaigns[i].budget)});
    }
    out.push_back({"metrics.accounting", acc_err <= 1e-9,
                   describe("max accumulator vs win-log gap", acc_err,
                            static_cast<int>(st.history.size()))});

    double total_clicks = 0.0;
    double total_conv = 0.0;
    double total_bid = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total_clicks += clicks[i];
        total_conv += conv[i];
        total_bid += bid_sum[i];
    }
    double def_err = std::abs(tcv(st) - total_conv);
    const std::optional<double> cpc = cpc_avg(st);
    if (total_clicks > 0.0) {
        def_err = std::max(def_err, cpc ? std::abs(*cpc - total_bid / total_clicks)
                                        : std::numeric_limits<double>::infinity());
    } else if (cpc) {
        def_err = std::numeric_limits<double>::infinity();
    }
    out.push_back({"metrics.definitions", def_err <= 1e-12,
                   describe("max tcv / cpc definition gap", def_err,
                            static_cast<int>(st.history.size()))});

    // Zero budgets silence every bid, so nothing is won or clicked and every
    // metric that divides by clicks must go absent.
    SimulationConfig cfg2 = cfg;
    cfg2.T = 10;
    for (Campaign& c : cfg2.campaigns) c.budget = 0.0;
    const SimulationState st2 = run_simulation(cfg2, dataset);
    const bool undefined_ok = !cpc_avg(st2).has_value() && tcv(st2) == 0.0;
    out.push_back({"metrics.undefined_cpc", undefined_ok,
                   undefined_ok ? "cpc_avg absent and tcv 0 with no wins"
                                : "metrics defined despite a winless run"});

    // Fixed two-row aggregate with known mean and sample std.
    std::vector<SweepResult> rows(2);
    for (SweepResult& r : rows) {
        r.policy = PolicyKind::NonRobust;
        r.eps_a = 1e-4;
        r.eps_b = 1e-4;
    }
    rows[0].seed = 0;
    rows[0].tcv = 1.0;
    rows[0].cpc_avg = 1.0;
    rows[1].seed = 1;
    rows[1].tcv = 3.0;
    rows[1].cpc_avg = 3.0;
    rows[1].flags = {"fit_nonconverged"};
    const auto cells = aggregate(rows);
    bool agg_ok = cells.size() == 1;
    if (agg_ok) {
        const CellStats& cs = cells.begin()->second;
        const double root2 = std::sqrt(2.0);
        agg_ok = std::abs(cs.mean_tcv - 2.0) <= 1e-12 && std::abs(cs.std_tcv - root2) <= 1e-12 &&
                 cs.mean_cpc && std::abs(*cs.mean_cpc - 2.0) <= 1e-12 && cs.std_cpc &&
                 std::abs(*cs.std_cpc - root2) <= 1e-12 && cs.n_seeds == 2 && cs.n_flagged == 1;
    }
    out.push_back({"metrics.aggregate", agg_ok,
                   agg_ok ? "two-seed cell matches closed-form mean / std / counts"
                          : "two-seed cell aggregate mismatch"});
    return out;
}

std::vector<CheckResult> verify_a_term(int points, std::uint64_t seed) {
    double worst_rel = 0.0;
    int tested = 0;
    for (int i = 0; i < points; ++i) {
        Rng rng(mix_seed(seed, 60000 + static_cast<std::uint64_t>(i)));
        double la = 0.0;
        double lb = 0.0;
        double c = 0.0;
        double v = 0.0;
        double a_term = 0.0;
        // Rejection keeps 4*la*lb away from the singular surface at 1 and the
        // slope away from 0, where a relative comparison loses meaning.
        for (int tries = 0; tries < 200; ++tries) {
            la = log_uniform(rng, 0.3, 3.0);
            double margin = log_uniform(rng, 0.15, 5.0);
            const bool below = rng.uniform() < 1.0 / 3.0;
            if (below) margin = std::min(margin, 0.95);
            lb = (below ? 1.0 - margin : 1.0 + margin) / (4.0 * la);
            c = rng.uniform_open_low(0.05, 0.9);
            v = rng.uniform_open_low(0.05, 0.9);
            a_term = joint_A_term(la, lb, c, v);
            if (std::abs(a_term) >= 0.5) break;
        }
        if (std::abs(a_term) < 0.5) continue;
        ++tested;

        // Step sized to the pole distance; two Richardson levels push the
        // truncation error far below the roundoff floor.
        const double dist = std::abs(1.0 - std::sqrt(4.0 * la * lb));
        const double h = std::clamp(2e-3 * dist, 1e-5, 1e-2);
        const auto central = [&](double step) {
            return (joint_inner_f(1.0 + step, la, lb, c, v) -
                    joint_inner_f(1.0 - step, la, lb, c, v)) /
                   (2.0 * step);
        };
        const double d1 = central(h);
        const double d2 = central(h / 2.0);
        const double d3 = central(h / 4.0);
        const double r1 = (4.0 * d2 - d1) / 3.0;
        const double r2 = (4.0 * d3 - d2) / 3.0;
        const double fd = (16.0 * r2 - r1) / 15.0;
        worst_rel = std::max(worst_rel, std::abs(a_term - fd) / std::abs(a_term));
    }
    return {{"consistency.a_term", worst_rel <= 1e-8 && tested == points,
             describe("max relative gap to the finite difference", worst_rel, tested)}};
}

std::vector<CheckResult> verify_calibration(int trials, std::uint64_t seed) {
    const double q = 0.9;
    const int advertisers = 10;
    const int n = 100;
    int covered = 0;
    for (int trial = 0; trial < trials; ++trial) {
        Rng rng(mix_seed(seed, 80000 + static_cast<std::uint64_t>(trial)));
        // Half squared error of a 5-dimensional Gaussian perturbation.
        const auto draw = [&]() {
            double s = 0.0;
            for (int j = 0; j < 5; ++j) {
                const double d = 0.1 * rng.normal();
                s += d * d;
            }
            return 0.5 * s;
        };
        std::vector<double> losses(n);
        for (double& l : losses) l = draw();
        const CalibratedEpsilon cal = calibrate_epsilon(losses, q, advertisers);
        if (draw() <= cal.epsilon) ++covered;
    }
    const double coverage = static_cast<double>(covered) / trials;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "fresh-loss coverage %.4f over %d trials (target 0.88)",
                  coverage, trials);
    return {{"metrics.calibration_coverage", coverage >= 0.88, buf}};
}

std::vector<CheckResult> run_suite(std::string_view name) {
    if (name == "worst_case") return verify_worst_case();
    if (name == "duality") return verify_duality();
    if (name == "consistency") {
        std::vector<CheckResult> out = verify_consistency();
        const std::vector<CheckResult> more = verify_a_term();
        out.insert(out.end(), more.begin(), more.end());
        return out;
    }
    if (name == "psd") return verify_psd();
    if (name == "metrics") {
        std::vector<CheckResult> out = verify_metrics();
        const std::vector<CheckResult> more = verify_calibration();
        out.insert(out.end(), more.begin(), more.end());
        return out;
    }
    throw std::invalid_argument("unknown verify suite: " + std::string(name));
}

bool all_passed(const std::vector<CheckResult>& results) {
    return std::all_of(results.begin(), results.end(),
                       [](const CheckResult& r) { return r.pass; });
}

}  // namespace robustbid
