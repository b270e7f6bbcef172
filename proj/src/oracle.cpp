#include "robustbid/oracle.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "robustbid/rng.hpp"

namespace robustbid::oracle {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Projects a onto the ball of the given radius around center.
void project_ball(std::vector<double>& a, const std::vector<double>& center, double radius) {
    double dist_sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - center[i];
        dist_sq += d * d;
    }
    if (dist_sq <= radius * radius) return;
    const double scale = radius / std::sqrt(dist_sq);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = center[i] + scale * (a[i] - center[i]);
}

// Exact minimizer of sum_t w_t * a_t over the ball; the alternating joint
// scheme uses this as its single-ball step.
std::vector<double> ball_step(const std::vector<double>& center, const std::vector<double>& w,
                              double radius) {
    double norm_sq = 0.0;
    for (double v : w) norm_sq += v * v;
    if (norm_sq == 0.0 || radius == 0.0) return center;
    const double scale = radius / std::sqrt(norm_sq);
    std::vector<double> out(center.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = center[i] - scale * w[i];
    return out;
}

}  // namespace

BallMinimizerResult numeric_ball_minimizer(const RateVector& rate_pred, const RateVector& weights,
                                           double epsilon, double tol, int max_iters) {
    if (weights.size() != rate_pred.size())
        throw std::invalid_argument("numeric_ball_minimizer: size mismatch");
    if (tol <= 0.0) throw std::invalid_argument("numeric_ball_minimizer: tol must be positive");

    const double radius = std::sqrt(2.0 * epsilon);
    BallMinimizerResult res;
    res.argmin = rate_pred;

    double grad_norm = std::sqrt(dot(weights, weights));
    if (grad_norm == 0.0 || radius == 0.0) {
        res.objective = dot(weights, res.argmin);
        res.converged = true;
        return res;
    }

    const double step = radius / grad_norm;  // moves about one radius per iteration
    for (int it = 0; it < max_iters; ++it) {
        std::vector<double> next = res.argmin;
        for (std::size_t i = 0; i < next.size(); ++i) next[i] -= step * weights[i];
        project_ball(next, rate_pred, radius);

        double move_sq = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i) {
            const double d = next[i] - res.argmin[i];
            move_sq += d * d;
        }
        res.argmin = std::move(next);
        res.iterations = it + 1;
        if (std::sqrt(move_sq) / step <= tol) {  // projected-gradient stationarity
            res.converged = true;
            break;
        }
    }
    res.objective = dot(weights, res.argmin);
    return res;
}

double joint_worst_case_value(const std::vector<char>& x, const RateVector& ctr,
                              const RateVector& cvr, double r_a, double r_b, std::uint64_t seed,
                              int alternations, int restarts) {
    const std::size_t n = ctr.size();
    if (x.size() != n || cvr.size() != n)
        throw std::invalid_argument("joint_worst_case_value: size mismatch");

    auto value = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t t = 0; t < n; ++t)
            if (x[t]) s += a[t] * b[t];
        return s;
    };
    auto masked = [&](const std::vector<double>& v) {
        std::vector<double> w(n, 0.0);
        for (std::size_t t = 0; t < n; ++t)
            if (x[t]) w[t] = v[t];
        return w;
    };

    Rng rng(seed);
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        std::vector<double> a = ctr, b = cvr;
        if (r > 0) {  // boundary restarts; the first pass starts at the centers
            auto da = rng.sphere_direction(static_cast<int>(n));
            auto db = rng.sphere_direction(static_cast<int>(n));
            for (std::size_t t = 0; t < n; ++t) {
                a[t] += r_a * da[t];
                b[t] += r_b * db[t];
            }
        }
        double prev = value(a, b);
        for (int it = 0; it < alternations; ++it) {
            a = ball_step(ctr, masked(b), r_a);
            b = ball_step(cvr, masked(a), r_b);
            const double v = value(a, b);
            if (prev - v < 1e-15) {
                prev = std::min(prev, v);
                break;
            }
            prev = v;
        }
        best = std::min(best, prev);
    }
    return best;
}

PrimalResult brute_force_primal(const PrimalInstance& inst) {
    const std::size_t n = inst.wp.size();
    if (inst.ctr.size() != n || inst.cvr.size() != n)
        throw std::invalid_argument("brute_force_primal: size mismatch");
    const std::size_t cap = inst.mode == PrimalMode::RobustJoint ? 8 : 12;
    if (n > cap) throw std::invalid_argument("brute_force_primal: instance too large to enumerate");

    const double r_a = std::sqrt(2.0 * inst.eps_a);
    const double r_b = std::sqrt(2.0 * inst.eps_b);
    const double slack = 1e-12;

    PrimalResult res;
    res.best_value = -std::numeric_limits<double>::infinity();

    for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
        std::vector<char> x(n, 0);
        double spend = 0.0, clicks = 0.0, x_norm_sq = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            if (mask & (1ull << t)) {
                x[t] = 1;
                spend += inst.wp[t];
                clicks += inst.ctr[t];
                x_norm_sq += 1.0;
            }
        }
        if (spend > inst.budget + slack) continue;

        // CPC cap: spend <= C * clicks, with clicks worst-cased over the CTR
        // ball when CTR is uncertain.
        double worst_clicks = clicks;
        if (inst.mode == PrimalMode::RobustCtr || inst.mode == PrimalMode::RobustJoint)
            worst_clicks = clicks - r_a * std::sqrt(x_norm_sq);
        if (spend > inst.cpc_cap * worst_clicks + slack) continue;

        double value = 0.0;
        switch (inst.mode) {
            case PrimalMode::NonRobust: {
                for (std::size_t t = 0; t < n; ++t)
                    if (x[t]) value += inst.ctr[t] * inst.cvr[t];
                break;
            }
            case PrimalMode::RobustCtr: {
                double nominal = 0.0, dir_sq = 0.0;
                for (std::size_t t = 0; t < n; ++t) {
                    if (!x[t]) continue;
                    nominal += inst.ctr[t] * inst.cvr[t];
                    dir_sq += inst.cvr[t] * inst.cvr[t];
                }
                value = nominal - r_a * std::sqrt(dir_sq);
                break;
            }
            case PrimalMode::RobustCvr: {
                double nominal = 0.0, dir_sq = 0.0;
                for (std::size_t t = 0; t < n; ++t) {
                    if (!x[t]) continue;
                    nominal += inst.ctr[t] * inst.cvr[t];
                    dir_sq += inst.ctr[t] * inst.ctr[t];
                }
                value = nominal - r_b * std::sqrt(dir_sq);
                break;
            }
            case PrimalMode::RobustJoint: {
                value = joint_worst_case_value(x, inst.ctr, inst.cvr, r_a, r_b,
                                               mix_seed(inst.seed, mask));
                break;
            }
        }

        ++res.n_feasible;
        if (value > res.best_value) {
            res.best_value = value;
            res.best_x = x;
        }
    }

    if (res.n_feasible == 0) {  // cannot happen: the empty allocation is feasible
        res.best_value = 0.0;
        res.best_x.assign(n, 0);
    }
    return res;
}

double psd_min_eigenvalue(double lambda_a, double lambda_b, const std::vector<double>& x) {
    const auto n = static_cast<Eigen::Index>(x.size());
    if (n == 0 || n > 50) throw std::invalid_argument("psd_min_eigenvalue: need 1 <= T <= 50");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (Eigen::Index t = 0; t < n; ++t) {
        m(t, t) = lambda_a;
        m(n + t, n + t) = lambda_b;
        m(t, n + t) = 0.5 * x[static_cast<std::size_t>(t)];
        m(n + t, t) = 0.5 * x[static_cast<std::size_t>(t)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

bool psd_check(double lambda_a, double lambda_b, const std::vector<double>& x, double tol) {
    return psd_min_eigenvalue(lambda_a, lambda_b, x) >= -tol;
}

bool psd_scalar_condition(double lambda_a, double lambda_b, const std::vector<double>& x,
                          double tol) {
    double max_sq = 0.0;
    for (double v : x) max_sq = std::max(max_sq, v * v);
    return lambda_a >= -tol && lambda_a * lambda_b - 0.25 * max_sq >= -tol;
}

}  // namespace robustbid::oracle
