#include "robustbid/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "robustbid/rng.hpp"

namespace robustbid {

UncertaintyBudget UncertaintyBudget::from_epsilon(double eps) {
    if (eps < 0.0) throw std::invalid_argument("uncertainty budget must be nonnegative");
    return UncertaintyBudget{eps, radius_from_epsilon(eps)};
}

CalibratedEpsilon calibrate_epsilon(std::vector<double> losses, double q, int advertiser_count) {
    if (losses.empty()) throw std::invalid_argument("calibrate_epsilon: empty loss sample");
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("calibrate_epsilon: q must be in (0, 1)");
    if (advertiser_count < 1) throw std::invalid_argument("calibrate_epsilon: advertiser count must be >= 1");

    std::sort(losses.begin(), losses.end());
    const auto n = static_cast<double>(losses.size());
    const double level = (1.0 + 1.0 / advertiser_count) * q;

    CalibratedEpsilon out;
    if (level >= 1.0) {
        out.epsilon = losses.back();
        out.clamped = true;
        return out;
    }
    auto k = static_cast<std::size_t>(std::ceil(level * n));
    k = std::clamp<std::size_t>(k, 1, losses.size());
    out.epsilon = losses[k - 1];
    return out;
}

RateVector worst_case_rates(const RateVector& rate_pred, const RateVector& weights, double epsilon) {
    if (weights.size() != rate_pred.size())
        throw std::invalid_argument("worst_case_rates: weights/prediction size mismatch");
    if (epsilon < 0.0) throw std::invalid_argument("worst_case_rates: negative epsilon");
    double norm_sq = 0.0;
    for (std::size_t t = 0; t < weights.size(); ++t) {
        if (weights[t] < 0.0) throw std::invalid_argument("worst_case_rates: negative weight");
        norm_sq += weights[t] * weights[t];
    }
    if (norm_sq == 0.0) return rate_pred;  // constant objective, prediction is canonical

    const double scale = radius_from_epsilon(epsilon) / std::sqrt(norm_sq);
    RateVector out(rate_pred.size());
    for (std::size_t t = 0; t < out.size(); ++t) out[t] = rate_pred[t] - scale * weights[t];
    return out;
}

double radius_nonneg_bound(const RateVector& rate_pred, const RateVector& weights) {
    if (weights.size() != rate_pred.size())
        throw std::invalid_argument("radius_nonneg_bound: size mismatch");
    double norm_sq = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("radius_nonneg_bound: negative weight");
        norm_sq += w * w;
    }
    if (norm_sq == 0.0) return std::numeric_limits<double>::infinity();
    const double norm = std::sqrt(norm_sq);
    double bound = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < weights.size(); ++t) {
        if (weights[t] > 0.0) bound = std::min(bound, rate_pred[t] * norm / weights[t]);
    }
    return bound;
}

double epsilon_nonneg_bound(const RateVector& rate_pred, const RateVector& weights) {
    const double r = radius_nonneg_bound(rate_pred, weights);
    if (std::isinf(r)) return r;
    return 0.5 * r * r;
}

RateVector perturb_rates(const RateVector& rate_true, double epsilon, std::uint64_t seed) {
    if (epsilon < 0.0) throw std::invalid_argument("perturb_rates: negative epsilon");
    if (epsilon == 0.0 || rate_true.empty()) return rate_true;

    Rng rng(seed);
    const std::vector<double> dir = rng.sphere_direction(static_cast<int>(rate_true.size()));
    const double radius = radius_from_epsilon(epsilon);
    RateVector out(rate_true.size());
    for (std::size_t t = 0; t < out.size(); ++t)
        out[t] = std::clamp(rate_true[t] + radius * dir[t], 0.0, 1.0);
    return out;
}

}  // namespace robustbid
