#pragma once

#include <stdexcept>
#include <vector>

#include "robustbid/types.hpp"

namespace robustbid {

// The joint-certificate expressions divide by 4*lambda_a*lambda_b - x^2.
struct SingularDenominator : std::domain_error {
    using std::domain_error::domain_error;
};

// Margin kept between 4*lambda_a*lambda_b and 1 by the joint dual fitter.
inline constexpr double kLambdaMargin = 1e-3;

struct BidDecision {
    int t = 0;
    double bid = 0.0;
    double base_bid = 0.0;
    double delta = 0.0;        // nonpositive robust correction
    bool active = false;       // t belongs to the active set
    bool bid_clamped = false;  // base + delta went negative; bid clamped to 0
    bool delta_clamped = false;  // certificate A-term was negative; delta clamped to 0
};

struct ActiveSet {
    std::vector<char> member;  // one flag per timestep
    int count = 0;
    double sum_cvr_sq = 0.0;  // over members; drives the CTR-side correction
    double sum_ctr_sq = 0.0;  // over members; drives the CVR-side correction
    bool converged = true;
    bool cycled = false;  // fixed point hit a cycle; resolved to its smallest set
};

struct ActiveSetOptions {
    int max_iters = 50;
    // One-shot threshold variant that marks auctions with base bid <= price
    // as active instead of running the win-rule fixed point. Kept only for
    // comparison runs; the shipped policies never set it.
    bool inverted_rule = false;
};

// Baseline bid: (cvr * ctr + q * C * ctr) / (p + q). Throws when p + q = 0,
// where the formula is undefined.
double bid_nonrobust(const DualVars& duals, double cpc_cap, double ctr, double cvr);

// Baseline with a dispersion haircut on the click estimate:
// the non-robust formula evaluated at max(0, ctr - alpha * ctr_std).
double bid_risk(const DualVars& duals, double cpc_cap, double ctr, double ctr_std, double alpha,
                double cvr);

// Certificate function f(x) = (2x^2 h - 2x^3 g) / (4 la lb - x^2) with
// h = la*ctr^2 + lb*cvr^2 and g = ctr*cvr; the joint bid correction uses its
// slope at x = 1.
double joint_inner_f(double x, double lambda_a, double lambda_b, double ctr, double cvr);

// A = df/dx at x = 1:
// (4h - 6g) / (4 la lb - 1) + 4 (h - g) / (4 la lb - 1)^2.
double joint_A_term(double lambda_a, double lambda_b, double ctr, double cvr);

// Active set = auctions the perturbed bid still wins (bid >= winning price).
// The robust correction needs set aggregates and the set depends on the
// corrected bids, so membership is resolved by fixed-point iteration starting
// from the uncorrected bids; a cycle settles on its smallest (most
// conservative) set.
ActiveSet active_set_ctr(const DualVars& duals, double cpc_cap, const RateVector& ctr,
                         const RateVector& cvr, const std::vector<double>& wp, double eps_a,
                         const ActiveSetOptions& opts = {});

ActiveSet active_set_cvr(const DualVars& duals, double cpc_cap, const RateVector& ctr,
                         const RateVector& cvr, const std::vector<double>& wp, double eps_b,
                         const ActiveSetOptions& opts = {});

ActiveSet active_set_joint(const DualVars& duals, double cpc_cap, const RateVector& ctr,
                           const RateVector& cvr, const std::vector<double>& wp, double eps_a,
                           double eps_b, const ActiveSetOptions& opts = {});

// Per-item corrections given fitted duals and the aggregates of an already
// resolved active set. All are <= 0 except delta_joint, whose A-term has no
// sign guarantee; callers clamp positive values and flag.
double delta_ctr(const DualVars& duals, double cpc_cap, double cvr_t, double eps_a,
                 int active_count, double sum_cvr_sq);
double delta_cvr(const DualVars& duals, double ctr_t, double eps_b, double sum_ctr_sq);
double delta_joint(const DualVars& duals, double ctr_t, double cvr_t, double eps_a,
                   int active_count);

// Full per-auction decisions: base bid plus the policy's correction for
// active auctions, zero correction otherwise, clamped at zero.
std::vector<BidDecision> bids_robust_ctr(const DualVars& duals, double cpc_cap,
                                         const RateVector& ctr_pred, const RateVector& cvr,
                                         const std::vector<double>& wp, double eps_a,
                                         const ActiveSetOptions& opts = {});

std::vector<BidDecision> bids_robust_cvr(const DualVars& duals, double cpc_cap,
                                         const RateVector& ctr, const RateVector& cvr_pred,
                                         const std::vector<double>& wp, double eps_b,
                                         const ActiveSetOptions& opts = {});

std::vector<BidDecision> bids_robust_joint(const DualVars& duals, double cpc_cap,
                                           const RateVector& ctr_pred, const RateVector& cvr_pred,
                                           const std::vector<double>& wp, double eps_a,
                                           double eps_b, const ActiveSetOptions& opts = {});

}  // namespace robustbid
