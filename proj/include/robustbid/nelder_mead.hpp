#pragma once

#include <functional>
#include <vector>

namespace robustbid {

using Objective = std::function<double(const std::vector<double>&)>;

struct OptimOptions {
    double f_tol = 1e-10;  // simplex value spread at which to stop
    int max_iters = 400;
    double initial_step = 0.25;  // simplex edge relative to coordinate scale
};

struct OptimResult {
    std::vector<double> x;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Downhill simplex restricted to the nonnegative orthant (the multipliers
// live there); candidate points are clamped at 0 before evaluation. The dual
// objectives are piecewise linear in places, which is why the polish step
// below exists: the simplex can stall on a kink.
OptimResult nelder_mead(const Objective& f, std::vector<double> start,
                        const OptimOptions& opts = {});

// Coordinate pattern search: walk +/- step along each axis, accept strict
// improvements, halve the step when a full sweep fails. Slow but immune to
// kinks; used to refine whatever the simplex found. With a positive f_tol,
// once the step is fine (<= 1e-3 relative) a halving that gained no more
// than f_tol ends the search early instead of walking micro-improvements
// down to step_min.
OptimResult compass_refine(const Objective& f, std::vector<double> x, double step0,
                           double step_min, double f_tol = 0.0);

// Simplex descent from every start, then compass polish on the best.
OptimResult multistart_minimize(const Objective& f,
                                const std::vector<std::vector<double>>& starts,
                                const OptimOptions& opts = {});

}  // namespace robustbid
