#include "robustbid/bidding.hpp"

#include <algorithm>
#include <cmath>

namespace robustbid {

namespace {

void require_positive_duals(const DualVars& duals, const char* who) {
    if (duals.p < 0.0 || duals.q < 0.0)
        throw std::invalid_argument(std::string(who) + ": negative dual variable");
    if (duals.p + duals.q <= 0.0)
        throw std::invalid_argument(std::string(who) + ": p + q must be positive");
}

struct SetAggregates {
    int count = 0;
    double sum_cvr_sq = 0.0;
    double sum_ctr_sq = 0.0;
};

SetAggregates aggregates_of(const std::vector<char>& member, const RateVector& ctr,
                            const RateVector& cvr) {
    SetAggregates agg;
    for (std::size_t t = 0; t < member.size(); ++t) {
        if (!member[t]) continue;
        ++agg.count;
        agg.sum_ctr_sq += ctr[t] * ctr[t];
        agg.sum_cvr_sq += cvr[t] * cvr[t];
    }
    return agg;
}

// Membership rule: t is active iff base_margin[t] >= discount(t, aggregates),
// where base_margin is the uncorrected bid minus the winning price and the
// discount is the policy's |delta|. Starts from the zero-discount set.
template <class DiscountFn>
ActiveSet fixed_point(const std::vector<double>& base_margin, const RateVector& ctr,
                      const RateVector& cvr, DiscountFn&& discount, const ActiveSetOptions& opts) {
    const std::size_t n = base_margin.size();
    ActiveSet set;
    set.member.resize(n);
    for (std::size_t t = 0; t < n; ++t) set.member[t] = base_margin[t] >= 0.0;

    // The update is a deterministic map on subsets, so it either reaches a
    // fixed point or enters a cycle; a window of recent states catches the
    // cycle, which is resolved to its smallest (most conservative) set.
    constexpr std::size_t kWindow = 16;
    std::vector<std::vector<char>> recent;
    for (int iter = 0; iter < opts.max_iters; ++iter) {
        const SetAggregates agg = aggregates_of(set.member, ctr, cvr);
        std::vector<char> next(n);
        for (std::size_t t = 0; t < n; ++t)
            next[t] = base_margin[t] - discount(t, agg) >= 0.0;

        if (next == set.member) {
            set.converged = true;
            break;
        }
        bool found = false;
        for (std::size_t j = recent.size(); j-- > 0 && !found;) {
            if (next != recent[j]) continue;
            // States from recent[j] through the current one repeat forever;
            // keep the smallest set among them.
            auto count_of = [](const std::vector<char>& m) {
                return std::count(m.begin(), m.end(), char(1));
            };
            auto best = count_of(set.member);
            for (std::size_t k = j; k < recent.size(); ++k) {
                const auto c = count_of(recent[k]);
                if (c < best) {
                    best = c;
                    set.member = recent[k];
                }
            }
            set.cycled = true;
            set.converged = true;
            found = true;
        }
        if (found) break;

        if (recent.size() == kWindow) recent.erase(recent.begin());
        recent.push_back(set.member);
        set.member = std::move(next);
        set.converged = iter + 1 < opts.max_iters;
    }

    const SetAggregates agg = aggregates_of(set.member, ctr, cvr);
    set.count = agg.count;
    set.sum_ctr_sq = agg.sum_ctr_sq;
    set.sum_cvr_sq = agg.sum_cvr_sq;
    return set;
}

std::vector<double> base_margins(const DualVars& duals, double cpc_cap, const RateVector& ctr,
                                 const RateVector& cvr, const std::vector<double>& wp) {
    std::vector<double> margin(wp.size());
    for (std::size_t t = 0; t < wp.size(); ++t)
        margin[t] = bid_nonrobust(duals, cpc_cap, ctr[t], cvr[t]) - wp[t];
    return margin;
}

ActiveSet inverted_threshold_set(const std::vector<double>& base_margin, const RateVector& ctr,
                                 const RateVector& cvr) {
    ActiveSet set;
    set.member.resize(base_margin.size());
    for (std::size_t t = 0; t < base_margin.size(); ++t) set.member[t] = base_margin[t] <= 0.0;
    const SetAggregates agg = aggregates_of(set.member, ctr, cvr);
    set.count = agg.count;
    set.sum_ctr_sq = agg.sum_ctr_sq;
    set.sum_cvr_sq = agg.sum_cvr_sq;
    return set;
}

}  // namespace

double bid_nonrobust(const DualVars& duals, double cpc_cap, double ctr, double cvr) {
    require_positive_duals(duals, "bid_nonrobust");
    const double denom = duals.p + duals.q;
    return (cvr * ctr + duals.q * cpc_cap * ctr) / denom;
}

double bid_risk(const DualVars& duals, double cpc_cap, double ctr, double ctr_std, double alpha,
                double cvr) {
    if (ctr_std < 0.0) throw std::invalid_argument("bid_risk: negative ctr_std");
    if (alpha < 0.0) throw std::invalid_argument("bid_risk: negative alpha");
    const double ctr_risk = std::max(0.0, ctr - alpha * ctr_std);
    return bid_nonrobust(duals, cpc_cap, ctr_risk, cvr);
}

double joint_inner_f(double x, double lambda_a, double lambda_b, double ctr, double cvr) {
    const double denom = 4.0 * lambda_a * lambda_b - x * x;
    if (std::abs(denom) < 1e-9)
        throw SingularDenominator("joint_inner_f: 4*lambda_a*lambda_b - x^2 is singular");
    const double h = lambda_a * ctr * ctr + lambda_b * cvr * cvr;
    const double g = ctr * cvr;
    return (2.0 * x * x * h - 2.0 * x * x * x * g) / denom;
}

double joint_A_term(double lambda_a, double lambda_b, double ctr, double cvr) {
    const double denom = 4.0 * lambda_a * lambda_b - 1.0;
    if (std::abs(denom) < 1e-9)
        throw SingularDenominator("joint_A_term: 4*lambda_a*lambda_b - 1 is singular");
    const double h = lambda_a * ctr * ctr + lambda_b * cvr * cvr;
    const double g = ctr * cvr;
    return (4.0 * h - 6.0 * g) / denom + 4.0 * (h - g) / (denom * denom);
}

double delta_ctr(const DualVars& duals, double cpc_cap, double cvr_t, double eps_a,
                 int active_count, double sum_cvr_sq) {
    if (active_count <= 0) return 0.0;
    const double alpha = std::sqrt(2.0 * eps_a);
    const double cpc_term = cpc_cap * duals.q / std::sqrt(static_cast<double>(active_count));
    const double value_term = sum_cvr_sq > 0.0 ? cvr_t * cvr_t / std::sqrt(sum_cvr_sq) : 0.0;
    return -(alpha / (duals.p + duals.q)) * (cpc_term + value_term);
}

double delta_cvr(const DualVars& duals, double ctr_t, double eps_b, double sum_ctr_sq) {
    if (sum_ctr_sq <= 0.0) return 0.0;
    const double alpha = std::sqrt(2.0 * eps_b);
    return -(alpha / (duals.p + duals.q)) * ctr_t / std::sqrt(sum_ctr_sq);
}

double delta_joint(const DualVars& duals, double ctr_t, double cvr_t, double eps_a,
                   int active_count) {
    if (active_count <= 0) return 0.0;
    const double alpha = std::sqrt(2.0 * eps_a);
    const double cpc_term = duals.q / std::sqrt(static_cast<double>(active_count));
    const double a_term = joint_A_term(duals.lambda_a, duals.lambda_b, ctr_t, cvr_t);
    return -(alpha / (duals.p + duals.q)) * (cpc_term + a_term);
}

ActiveSet active_set_ctr(const DualVars& duals, double cpc_cap, const RateVector& ctr,
                         const RateVector& cvr, const std::vector<double>& wp, double eps_a,
                         const ActiveSetOptions& opts) {
    require_positive_duals(duals, "active_set_ctr");
    const std::vector<double> margin = base_margins(duals, cpc_cap, ctr, cvr, wp);
    if (opts.inverted_rule) return inverted_threshold_set(margin, ctr, cvr);
    return fixed_point(margin, ctr, cvr,
                       [&](std::size_t t, const SetAggregates& agg) {
                           return -delta_ctr(duals, cpc_cap, cvr[t], eps_a, agg.count,
                                             agg.sum_cvr_sq);
                       },
                       opts);
}

ActiveSet active_set_cvr(const DualVars& duals, double cpc_cap, const RateVector& ctr,
                         const RateVector& cvr, const std::vector<double>& wp, double eps_b,
                         const ActiveSetOptions& opts) {
    require_positive_duals(duals, "active_set_cvr");
    const std::vector<double> margin = base_margins(duals, cpc_cap, ctr, cvr, wp);
    if (opts.inverted_rule) return inverted_threshold_set(margin, ctr, cvr);
    return fixed_point(margin, ctr, cvr,
                       [&](std::size_t t, const SetAggregates& agg) {
                           return -delta_cvr(duals, ctr[t], eps_b, agg.sum_ctr_sq);
                       },
                       opts);
}

ActiveSet active_set_joint(const DualVars& duals, double cpc_cap, const RateVector& ctr,
                           const RateVector& cvr, const std::vector<double>& wp, double eps_a,
                           double eps_b, const ActiveSetOptions& opts) {
    (void)eps_b;  // the correction uses the CTR-side radius; both radii shape the lambdas
    require_positive_duals(duals, "active_set_joint");
    if (4.0 * duals.lambda_a * duals.lambda_b - 1.0 < 1e-9)
        throw SingularDenominator("active_set_joint: need 4*lambda_a*lambda_b > 1");
    const std::vector<double> margin = base_margins(duals, cpc_cap, ctr, cvr, wp);
    if (opts.inverted_rule) return inverted_threshold_set(margin, ctr, cvr);
    return fixed_point(margin, ctr, cvr,
                       [&](std::size_t t, const SetAggregates& agg) {
                           // Clamped at zero so a negative A cannot promote an
                           // auction the base bid already loses.
                           return std::max(
                               0.0, -delta_joint(duals, ctr[t], cvr[t], eps_a, agg.count));
                       },
                       opts);
}

namespace {

template <class DeltaFn>
std::vector<BidDecision> assemble_bids(const DualVars& duals, double cpc_cap,
                                       const RateVector& ctr, const RateVector& cvr,
                                       const std::vector<double>& wp, const ActiveSet& set,
                                       DeltaFn&& delta_of) {
    std::vector<BidDecision> out(wp.size());
    for (std::size_t t = 0; t < wp.size(); ++t) {
        BidDecision& d = out[t];
        d.t = static_cast<int>(t);
        d.base_bid = bid_nonrobust(duals, cpc_cap, ctr[t], cvr[t]);
        d.active = set.member[t] != 0;
        if (d.active) {
            double delta = delta_of(t);
            if (delta > 0.0) {
                delta = 0.0;
                d.delta_clamped = true;
            }
            d.delta = delta;
        }
        d.bid = d.base_bid + d.delta;
        if (d.bid < 0.0) {
            d.bid = 0.0;
            d.bid_clamped = true;
        }
    }
    return out;
}

}  // namespace

std::vector<BidDecision> bids_robust_ctr(const DualVars& duals, double cpc_cap,
                                         const RateVector& ctr_pred, const RateVector& cvr,
                                         const std::vector<double>& wp, double eps_a,
                                         const ActiveSetOptions& opts) {
    if (eps_a < 0.0) throw std::invalid_argument("bids_robust_ctr: negative eps_a");
    const ActiveSet set = active_set_ctr(duals, cpc_cap, ctr_pred, cvr, wp, eps_a, opts);
    return assemble_bids(duals, cpc_cap, ctr_pred, cvr, wp, set, [&](std::size_t t) {
        return delta_ctr(duals, cpc_cap, cvr[t], eps_a, set.count, set.sum_cvr_sq);
    });
}

std::vector<BidDecision> bids_robust_cvr(const DualVars& duals, double cpc_cap,
                                         const RateVector& ctr, const RateVector& cvr_pred,
                                         const std::vector<double>& wp, double eps_b,
                                         const ActiveSetOptions& opts) {
    if (eps_b < 0.0) throw std::invalid_argument("bids_robust_cvr: negative eps_b");
    const ActiveSet set = active_set_cvr(duals, cpc_cap, ctr, cvr_pred, wp, eps_b, opts);
    return assemble_bids(duals, cpc_cap, ctr, cvr_pred, wp, set, [&](std::size_t t) {
        return delta_cvr(duals, ctr[t], eps_b, set.sum_ctr_sq);
    });
}

std::vector<BidDecision> bids_robust_joint(const DualVars& duals, double cpc_cap,
                                           const RateVector& ctr_pred, const RateVector& cvr_pred,
                                           const std::vector<double>& wp, double eps_a,
                                           double eps_b, const ActiveSetOptions& opts) {
    if (eps_a < 0.0 || eps_b < 0.0) throw std::invalid_argument("bids_robust_joint: negative eps");
    const ActiveSet set =
        active_set_joint(duals, cpc_cap, ctr_pred, cvr_pred, wp, eps_a, eps_b, opts);
    return assemble_bids(duals, cpc_cap, ctr_pred, cvr_pred, wp, set, [&](std::size_t t) {
        return delta_joint(duals, ctr_pred[t], cvr_pred[t], eps_a, set.count);
    });
}

}  // namespace robustbid
