#pragma once

#include <cmath>
#include <cstdint>

#include "robustbid/types.hpp"

namespace robustbid {

// Budget of an uncertainty set in half-squared-loss units. The set around a
// prediction r_hat is { r : 0.5 * ||r - r_hat||_2^2 <= epsilon }, i.e. a ball
// of radius sqrt(2 * epsilon).
struct UncertaintyBudget {
    double epsilon = 0.0;
    double radius = 0.0;

    static UncertaintyBudget from_epsilon(double eps);
};

inline double radius_from_epsilon(double eps) { return std::sqrt(2.0 * eps); }

struct CalibratedEpsilon {
    double epsilon = 0.0;
    // The corrected quantile level exceeded 1, so the sample maximum was used.
    bool clamped = false;
};

// Split-conformal calibration of the uncertainty budget: returns the k-th
// order statistic of the validation losses with k = ceil(n * (1 + 1/I) * q),
// so that a fresh loss stays below the returned value with probability at
// least q. I is the advertiser count behind the finite-sample correction.
CalibratedEpsilon calibrate_epsilon(std::vector<double> losses, double q, int advertiser_count);

// Exact minimizer of weights . a over the epsilon-ball around rate_pred:
// a = rate_pred - (m / ||m||) * sqrt(2 * eps). With all-zero weights the
// objective is constant and the prediction itself is returned. The output is
// not clipped; callers policing nonnegativity use epsilon_nonneg_bound.
RateVector worst_case_rates(const RateVector& rate_pred, const RateVector& weights, double epsilon);

// Largest epsilon for which worst_case_rates stays elementwise nonnegative:
// 0.5 * min over { t : m_t > 0 } of (pred_t * ||m|| / m_t)^2. All-zero
// weights make the bound vacuous; +infinity is returned.
double epsilon_nonneg_bound(const RateVector& rate_pred, const RateVector& weights);

// The same condition expressed as the largest admissible ball radius,
// min_t pred_t * ||m|| / m_t; equals sqrt(2 * epsilon_nonneg_bound).
double radius_nonneg_bound(const RateVector& rate_pred, const RateVector& weights);

// Experiment plumbing: pushes the true rates to the boundary of an
// epsilon-ball in a seeded uniform direction, then clips to [0, 1]. The
// result plays the role of a model prediction whose error is exactly eps
// (clipping can only shrink the distance).
RateVector perturb_rates(const RateVector& rate_true, double epsilon, std::uint64_t seed);

}  // namespace robustbid
