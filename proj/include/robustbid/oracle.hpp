#pragma once

#include <cstdint>
#include <vector>

#include "robustbid/types.hpp"

// Reference-grade verifiers: slower, simpler, and derived independently of
// the closed-form implementations they cross-check. Nothing here calls into
// the bidding or uncertainty internals.
namespace robustbid::oracle {

struct BallMinimizerResult {
    RateVector argmin;
    double objective = 0.0;  // weights . argmin
    bool converged = false;
    int iterations = 0;
};

// Projected gradient descent for min weights . a over
// { a : 0.5 * ||a - rate_pred||^2 <= epsilon }; the ball projection is
// closed-form. Stops at first-order stationarity below tol.
BallMinimizerResult numeric_ball_minimizer(const RateVector& rate_pred, const RateVector& weights,
                                           double epsilon, double tol = 1e-10,
                                           int max_iters = 20000);

enum class PrimalMode { NonRobust, RobustCtr, RobustCvr, RobustJoint };

struct PrimalInstance {
    RateVector ctr;  // ball centers (predictions)
    RateVector cvr;
    std::vector<double> wp;
    double budget = 0.0;
    double cpc_cap = 0.0;
    double eps_a = 0.0;
    double eps_b = 0.0;
    PrimalMode mode = PrimalMode::NonRobust;
    std::uint64_t seed = 0;  // restarts of the joint inner minimization
};

struct PrimalResult {
    double best_value = 0.0;
    std::vector<char> best_x;
    long n_feasible = 0;
};

// Enumerates all 2^T binary allocations, evaluates the worst-case value and
// the (worst-case, where applicable) CPC constraint for the given mode, and
// returns the best feasible value. Guarded to T <= 12 (T <= 8 joint).
PrimalResult brute_force_primal(const PrimalInstance& inst);

// Worst case of sum_t x_t * a_t * b_t over the two prediction balls of radii
// r_a, r_b, computed by alternating exact single-ball steps with random
// restarts. The bilinear objective is not jointly convex, so this certifies
// only a local minimum; restarts make that a tight one in practice.
double joint_worst_case_value(const std::vector<char>& x, const RateVector& ctr,
                              const RateVector& cvr, double r_a, double r_b, std::uint64_t seed,
                              int alternations = 200, int restarts = 5);

// Smallest eigenvalue of the 2T x 2T block matrix [[la*I, X/2], [X/2, lb*I]],
// X = diag(x), via a dense symmetric eigensolver. T <= 50.
double psd_min_eigenvalue(double lambda_a, double lambda_b, const std::vector<double>& x);

bool psd_check(double lambda_a, double lambda_b, const std::vector<double>& x, double tol = 1e-10);

// Scalar reduction of the same condition (Schur complement per 2x2 block):
// lambda_a >= 0 and lambda_a * lambda_b >= max_t x_t^2 / 4.
bool psd_scalar_condition(double lambda_a, double lambda_b, const std::vector<double>& x,
                          double tol = 1e-10);

}  // namespace robustbid::oracle
