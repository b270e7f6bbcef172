#include "robustbid/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace robustbid {

namespace {

std::vector<double> clamped(std::vector<double> x) {
    for (auto& v : x) v = std::max(v, 0.0);
    return x;
}

double eval(const Objective& f, const std::vector<double>& x) { return f(clamped(x)); }

}  // namespace

OptimResult nelder_mead(const Objective& f, std::vector<double> start, const OptimOptions& opts) {
    const std::size_t n = start.size();
    const double reflect = 1.0, expand = 2.0, contract = 0.5, shrink = 0.5;

    // Initial simplex: start plus one vertex per axis, step scaled to the
    // coordinate magnitude so tiny and large multipliers both move.
    std::vector<std::vector<double>> pts(n + 1, start);
    for (std::size_t i = 0; i < n; ++i) {
        double step = opts.initial_step * std::max(std::abs(start[i]), 1e-3);
        pts[i + 1][i] += step;
    }
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(f, pts[i]);

    OptimResult result;
    int iter = 0;
    for (; iter < opts.max_iters; ++iter) {
        // order vertices by value
        std::vector<std::size_t> idx(n + 1);
        for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        std::size_t best = idx[0], worst = idx[n], second_worst = idx[n - 1];

        if (fv[worst] - fv[best] <= opts.f_tol) {
            result.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t d = 0; d < n; ++d) centroid[d] += pts[i][d];
        }
        for (auto& c : centroid) c /= static_cast<double>(n);

        auto along = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t d = 0; d < n; ++d) p[d] = centroid[d] + coef * (centroid[d] - pts[worst][d]);
            return p;
        };

        std::vector<double> xr = along(reflect);
        double fr = eval(f, xr);
        if (fr < fv[idx[0]]) {
            std::vector<double> xe = along(expand);
            double fe = eval(f, xe);
            if (fe < fr) {
                pts[worst] = std::move(xe);
                fv[worst] = fe;
            } else {
                pts[worst] = std::move(xr);
                fv[worst] = fr;
            }
        } else if (fr < fv[second_worst]) {
            pts[worst] = std::move(xr);
            fv[worst] = fr;
        } else {
            bool outside = fr < fv[worst];
            std::vector<double> xc = along(outside ? contract : -contract);
            double fc = eval(f, xc);
            if (fc < std::min(fr, fv[worst])) {
                pts[worst] = std::move(xc);
                fv[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t d = 0; d < n; ++d)
                        pts[i][d] = pts[best][d] + shrink * (pts[i][d] - pts[best][d]);
                    fv[i] = eval(f, pts[i]);
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (fv[i] < fv[best]) best = i;
    result.x = clamped(pts[best]);
    result.fx = fv[best];
    result.iterations = iter;
    return result;
}

OptimResult compass_refine(const Objective& f, std::vector<double> x, double step0,
                           double step_min, double f_tol) {
    x = clamped(std::move(x));
    const std::size_t n = x.size();
    double fx = f(x);
    int evals = 0;
    double step = step0;
    while (step >= step_min) {
        const double fx_before = fx;
        bool improved;
        do {
            improved = false;
            for (std::size_t d = 0; d < n; ++d) {
                double delta = step * std::max(std::abs(x[d]), 1e-3);
                for (double sign : {+1.0, -1.0}) {
                    std::vector<double> y = x;
                    y[d] = std::max(y[d] + sign * delta, 0.0);
                    if (y[d] == x[d]) continue;
                    double fy = f(y);
                    ++evals;
                    if (fy < fx) {
                        x = std::move(y);
                        fx = fy;
                        improved = true;
                        break;
                    }
                }
            }
        } while (improved);
        if (f_tol > 0.0 && step <= 1e-3 && fx_before - fx <= f_tol) break;
        step *= 0.5;
    }
    OptimResult r;
    r.x = std::move(x);
    r.fx = fx;
    r.iterations = evals;
    r.converged = true;
    return r;
}

OptimResult multistart_minimize(const Objective& f, const std::vector<std::vector<double>>& starts,
                                const OptimOptions& opts) {
    OptimResult best;
    best.fx = std::numeric_limits<double>::infinity();
    for (const auto& s : starts) {
        OptimResult r = nelder_mead(f, s, opts);
        if (r.fx < best.fx) best = std::move(r);
    }
    OptimResult polished = compass_refine(f, best.x, 0.25, 1e-9, opts.f_tol);
    polished.converged = best.converged || polished.fx < best.fx;
    return polished;
}

}  // namespace robustbid
