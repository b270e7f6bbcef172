#pragma once

#include "robustbid/bidding.hpp"
#include "robustbid/types.hpp"

namespace robustbid {

// One campaign's view of past auctions: the rates it predicted then and the
// prices the market cleared at, plus its standing constraints.
struct FitInstance {
    RateVector ctr;
    RateVector cvr;
    std::vector<double> wp;
    double budget = 0.0;
    double cpc_cap = 0.0;
};

struct FitOptions {
    bool warm_start = false;
    DualVars start;     // taken as an extra (or the only) descent start
    bool quick = false;  // warm-start refinement only; skips the multistart sweep
    double f_tol = 1e-8;
    int nm_max_iters = 300;
    int multistarts = 5;
};

struct FitResult {
    DualVars duals;
    double objective = 0.0;
    bool converged = true;
    // Joint fit only: whether the lambda stationarity system closed, and
    // whether its solution fell inside the 4*la*lb >= 1 + margin validity
    // region and was projected onto it.
    bool lambda_converged = true;
    bool lambda_margin_hit = false;
    // Bid-rule active set evaluated at the fitted duals; empty when p + q = 0
    // (slack constraints, no bid formula). Robust fits only.
    ActiveSet active;
};

// Multipliers minimizing p*B + sum_t max(0, v_t - p*wp_t - q*(wp_t - C*ctr_t))
// over p, q >= 0, with v_t = ctr_t * cvr_t.
FitResult fit_duals_nonrobust(const FitInstance& inst, const FitOptions& opts = {});

// Reduced robust duals: for fixed (gamma, u0) the worst-case perturbation and
// the CPC cone variable have closed forms on the active set, leaving a 2-D
// outer minimization (p = gamma, q = u0).
FitResult fit_duals_robust_ctr(const FitInstance& inst, double eps_a, const FitOptions& opts = {});
FitResult fit_duals_robust_cvr(const FitInstance& inst, double eps_b, const FitOptions& opts = {});

// Joint fit: 2-D outer minimization interleaved with the lambda stationarity
// system restricted to the current active set; 4*la*lb >= 1 + margin is
// enforced throughout.
FitResult fit_duals_joint(const FitInstance& inst, double eps_a, double eps_b,
                          const FitOptions& opts = {});

// Reduced dual objectives at given multipliers, exposed for probe checks and
// the verification suites. The active set is resolved internally.
double dual_objective_nonrobust(const FitInstance& inst, const DualVars& duals);
double dual_objective_robust_ctr(const FitInstance& inst, double eps_a, const DualVars& duals);
double dual_objective_robust_cvr(const FitInstance& inst, double eps_b, const DualVars& duals);
double dual_objective_joint(const FitInstance& inst, double eps_a, double eps_b,
                            const DualVars& duals);

// Conservative certificate value of the joint dual at the given multipliers:
// descends both rate balls on the fitted set, then prices that fixed in-ball
// perturbation as a plain instance. Fixing the rates removes the inner
// minimization entirely, so the value bounds the worst case from above for
// any feasible multipliers.
double dual_certificate_joint(const FitInstance& inst, double eps_a, double eps_b,
                              const DualVars& duals);

struct LambdaSolution {
    double lambda_a = 0.0;
    double lambda_b = 0.0;
    bool margin_hit = false;
    bool converged = true;
};

// Solves sum over the active set of df/dlambda = -r^2 (componentwise for
// lambda_a with r_a and lambda_b with r_b) by damped Newton in log space,
// then projects onto 4*la*lb >= 1 + margin if needed. Zero radii push the
// corresponding lambda to a large cap, which drives the A-term to zero.
LambdaSolution solve_lambdas(const RateVector& ctr, const RateVector& cvr,
                             const std::vector<char>& active, double r_a, double r_b);

}  // namespace robustbid
