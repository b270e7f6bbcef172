#include "robustbid/dual_fit.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "robustbid/nelder_mead.hpp"

namespace robustbid {

namespace {

constexpr double kLambdaCap = 1e9;
constexpr double kLambdaFloor = 1e-9;

double ball_radius(double eps) { return eps > 0.0 ? std::sqrt(2.0 * eps) : 0.0; }

void check_instance(const FitInstance& inst) {
    const std::size_t n = inst.ctr.size();
    if (n == 0) throw std::invalid_argument("fit instance is empty");
    if (inst.cvr.size() != n || inst.wp.size() != n)
        throw std::invalid_argument("fit instance vectors disagree in length");
    if (inst.budget < 0.0 || inst.cpc_cap < 0.0)
        throw std::invalid_argument("fit instance has negative budget or cpc cap");
}

void base_hinges(const FitInstance& inst, double gamma, double u0, std::vector<double>& g) {
    const std::size_t n = inst.ctr.size();
    g.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        g[t] = inst.ctr[t] * inst.cvr[t] - (gamma + u0) * inst.wp[t] +
               inst.cpc_cap * u0 * inst.ctr[t];
    }
}

struct Agg {
    int count = 0;
    double sum_ctr_sq = 0.0;
    double sum_cvr_sq = 0.0;
};

Agg aggregate(const FitInstance& inst, const std::vector<char>& member) {
    Agg a;
    for (std::size_t t = 0; t < member.size(); ++t) {
        if (!member[t]) continue;
        ++a.count;
        a.sum_ctr_sq += inst.ctr[t] * inst.ctr[t];
        a.sum_cvr_sq += inst.cvr[t] * inst.cvr[t];
    }
    return a;
}

int member_count(const std::vector<char>& m) {
    int c = 0;
    for (char v : m) c += v != 0;
    return c;
}

// Membership fixed point in hinge space: t stays in while its hinge survives
// the set-dependent discount. Same iteration as the bid-side sets, including
// the smallest-set resolution of cycles; any resulting set yields a valid
// dual value, so convergence failures only cost tightness.
template <typename Disc>
Agg run_fixed_point(const FitInstance& inst, const std::vector<double>& g, Disc disc,
                    std::vector<char>& member) {
    const std::size_t n = g.size();
    member.resize(n);
    for (std::size_t t = 0; t < n; ++t) member[t] = g[t] >= 0.0 ? 1 : 0;
    constexpr std::size_t kWindow = 16;
    std::vector<std::vector<char>> recent;
    std::vector<char> next(n, 0);
    for (int iter = 0; iter < 50; ++iter) {
        const Agg a = aggregate(inst, member);
        for (std::size_t t = 0; t < n; ++t) next[t] = g[t] >= disc(t, a) ? 1 : 0;
        if (next == member) break;
        bool found = false;
        for (std::size_t j = recent.size(); j-- > 0 && !found;) {
            if (next != recent[j]) continue;
            int best = member_count(next);
            member = next;
            for (std::size_t k = j; k < recent.size(); ++k) {
                const int c = member_count(recent[k]);
                if (c < best) {
                    best = c;
                    member = recent[k];
                }
            }
            found = true;
        }
        if (found) break;
        if (recent.size() == kWindow) recent.erase(recent.begin());
        recent.push_back(member);
        member = next;
    }
    return aggregate(inst, member);
}

struct Scratch {
    std::vector<double> g;
    std::vector<char> member;
    std::vector<double> a_term;
};

double eval_nonrobust(const FitInstance& inst, double gamma, double u0, Scratch& s) {
    base_hinges(inst, gamma, u0, s.g);
    double obj = gamma * inst.budget;
    for (double h : s.g) obj += std::max(0.0, h);
    return obj;
}

// CTR-side reduced dual. The ball shift serves the value term and the cone
// covers the CPC side independently, so the per-item discount splits as
// alpha*cvr_t^2/|cvr| + C*alpha*u0/sqrt(k); membership and objective use the
// same discount, which is also the bid-side rule.
double eval_robust_ctr(const FitInstance& inst, double alpha, double gamma, double u0,
                       Scratch& s) {
    base_hinges(inst, gamma, u0, s.g);
    const double cu = inst.cpc_cap * u0;
    auto disc = [&](std::size_t t, const Agg& a) {
        if (a.count == 0) return 0.0;
        double d = alpha * cu / std::sqrt(static_cast<double>(a.count));
        if (a.sum_cvr_sq > 0.0) d += alpha * inst.cvr[t] * inst.cvr[t] / std::sqrt(a.sum_cvr_sq);
        return d;
    };
    const Agg a = run_fixed_point(inst, s.g, disc, s.member);

    double obj = gamma * inst.budget;
    for (std::size_t t = 0; t < s.g.size(); ++t) {
        double h = s.g[t];
        if (s.member[t]) h -= disc(t, a);
        obj += std::max(0.0, h);
    }
    return obj;
}

// CVR-side reduced dual. The CPC constraint carries no CVR uncertainty, so
// the exact ball shift already splits per item as ctr_t^2 / |m|; membership
// and objective use the same discount.
double eval_robust_cvr(const FitInstance& inst, double alpha, double gamma, double u0,
                       Scratch& s) {
    base_hinges(inst, gamma, u0, s.g);
    auto disc = [&](std::size_t t, const Agg& a) {
        if (a.sum_ctr_sq <= 0.0) return 0.0;
        return alpha * inst.ctr[t] * inst.ctr[t] / std::sqrt(a.sum_ctr_sq);
    };
    const Agg a = run_fixed_point(inst, s.g, disc, s.member);

    double obj = gamma * inst.budget;
    for (std::size_t t = 0; t < s.g.size(); ++t) {
        double h = s.g[t];
        if (s.member[t] && a.sum_ctr_sq > 0.0)
            h -= alpha * inst.ctr[t] * inst.ctr[t] / std::sqrt(a.sum_ctr_sq);
        obj += std::max(0.0, h);
    }
    return obj;
}

void require_lambda_margin(const DualVars& duals) {
    if (4.0 * duals.lambda_a * duals.lambda_b - 1.0 < 1e-9)
        throw SingularDenominator("joint dual evaluated without the 4*la*lb > 1 margin");
}

// Joint reduced dual: every hinge carries the certificate slope A_t scaled
// by the CTR-side radius, mirroring the bid correction so the positive-hinge
// set coincides with the bid-side active set; members additionally get their
// share of the CPC cone budget, u_t = u0 / sqrt(k), which is the exact cone
// minimizer since the alpha coefficients are uniform.
double eval_joint(const FitInstance& inst, double alpha_a, double lambda_a, double lambda_b,
                  double gamma, double u0, Scratch& s) {
    const std::size_t n = inst.ctr.size();
    base_hinges(inst, gamma, u0, s.g);
    s.a_term.resize(n);
    for (std::size_t t = 0; t < n; ++t)
        s.a_term[t] = alpha_a * joint_A_term(lambda_a, lambda_b, inst.ctr[t], inst.cvr[t]);
    auto disc = [&](std::size_t t, const Agg& a) {
        double d = s.a_term[t];
        if (a.count > 0) d += alpha_a * u0 / std::sqrt(static_cast<double>(a.count));
        return d;
    };
    const Agg a = run_fixed_point(inst, s.g, disc, s.member);

    const double cone = a.count > 0 ? alpha_a * u0 / std::sqrt(static_cast<double>(a.count)) : 0.0;
    double obj = gamma * inst.budget;
    for (std::size_t t = 0; t < n; ++t) {
        double h = s.g[t] - s.a_term[t];
        if (s.member[t]) h -= cone;
        obj += std::max(0.0, h);
    }
    return obj;
}

// df/dlambda_a of the certificate slope integrand at x = 1, per item.
double df_dla(double la, double lb, double c, double v) {
    const double d = 4.0 * la * lb - 1.0;
    const double h = la * c * c + lb * v * v;
    return (2.0 * c * c * d - 8.0 * lb * (h - c * v)) / (d * d);
}

double df_dlb(double la, double lb, double c, double v) {
    const double d = 4.0 * la * lb - 1.0;
    const double h = la * c * c + lb * v * v;
    return (2.0 * v * v * d - 8.0 * la * (h - c * v)) / (d * d);
}

struct StationarityResidual {
    double ra = 0.0;
    double rb = 0.0;
    bool valid = false;
};

StationarityResidual stationarity(const RateVector& ctr, const RateVector& cvr,
                                  const std::vector<char>& active, double la, double lb,
                                  double ra_sq, double rb_sq) {
    StationarityResidual r;
    if (4.0 * la * lb - 1.0 < 1e-6) return r;
    double sa = 0.0;
    double sb = 0.0;
    for (std::size_t t = 0; t < active.size(); ++t) {
        if (!active[t]) continue;
        sa += df_dla(la, lb, ctr[t], cvr[t]);
        sb += df_dlb(la, lb, ctr[t], cvr[t]);
    }
    r.ra = sa + ra_sq;
    r.rb = sb + rb_sq;
    r.valid = true;
    return r;
}

// Canonical multistart list for the 2-D outer descent, scaled to the value
// to price ratio of the instance so budget-slack and budget-tight regimes
// both get a nearby start.
std::vector<std::vector<double>> outer_starts(const FitInstance& inst, const FitOptions& opts) {
    double sv = 0.0;
    double sw = 0.0;
    for (std::size_t t = 0; t < inst.ctr.size(); ++t) {
        sv += inst.ctr[t] * inst.cvr[t];
        sw += inst.wp[t];
    }
    const double s = sw > 1e-12 ? std::max(sv / sw, 1e-3) : 1.0;
    std::vector<std::vector<double>> starts = {
        {0.0, 0.0}, {0.1 * s, 0.1 * s}, {s, s}, {10.0 * s, 10.0 * s}, {s, 0.1 * s},
    };
    const std::size_t keep =
        static_cast<std::size_t>(std::clamp(opts.multistarts, 1, static_cast<int>(starts.size())));
    starts.resize(keep);
    if (opts.warm_start)
        starts.insert(starts.begin(), {std::max(opts.start.p, 0.0), std::max(opts.start.q, 0.0)});
    return starts;
}

OptimResult minimize_outer(const Objective& f, const FitInstance& inst, const FitOptions& opts) {
    if (opts.quick && opts.warm_start) {
        OptimResult r =
            compass_refine(f, {std::max(opts.start.p, 0.0), std::max(opts.start.q, 0.0)}, 0.05,
                           1e-8, opts.f_tol);
        r.converged = true;
        return r;
    }
    OptimOptions nm;
    nm.f_tol = opts.f_tol;
    nm.max_iters = opts.nm_max_iters;
    return multistart_minimize(f, outer_starts(inst, opts), nm);
}

ActiveSet bid_side_set(PolicyKind kind, const FitInstance& inst, const DualVars& duals,
                       double eps_a, double eps_b) {
    if (duals.p + duals.q <= 1e-12) return {};
    switch (kind) {
        case PolicyKind::RobustCtr:
            return active_set_ctr(duals, inst.cpc_cap, inst.ctr, inst.cvr, inst.wp, eps_a);
        case PolicyKind::RobustCvr:
            return active_set_cvr(duals, inst.cpc_cap, inst.ctr, inst.cvr, inst.wp, eps_b);
        case PolicyKind::RobustJoint:
            return active_set_joint(duals, inst.cpc_cap, inst.ctr, inst.cvr, inst.wp, eps_a,
                                    eps_b);
        default:
            return {};
    }
}

}  // namespace

FitResult fit_duals_nonrobust(const FitInstance& inst, const FitOptions& opts) {
    check_instance(inst);
    Scratch s;
    const Objective f = [&](const std::vector<double>& x) {
        return eval_nonrobust(inst, x[0], x[1], s);
    };
    const OptimResult r = minimize_outer(f, inst, opts);
    FitResult out;
    out.duals.p = r.x[0];
    out.duals.q = r.x[1];
    out.objective = r.fx;
    out.converged = r.converged;
    return out;
}

FitResult fit_duals_robust_ctr(const FitInstance& inst, double eps_a, const FitOptions& opts) {
    check_instance(inst);
    const double alpha = ball_radius(eps_a);
    Scratch s;
    const Objective f = [&](const std::vector<double>& x) {
        return eval_robust_ctr(inst, alpha, x[0], x[1], s);
    };
    const OptimResult r = minimize_outer(f, inst, opts);
    FitResult out;
    out.duals.p = r.x[0];
    out.duals.q = r.x[1];
    out.objective = r.fx;
    out.converged = r.converged;
    out.active = bid_side_set(PolicyKind::RobustCtr, inst, out.duals, eps_a, 0.0);
    return out;
}

FitResult fit_duals_robust_cvr(const FitInstance& inst, double eps_b, const FitOptions& opts) {
    check_instance(inst);
    const double alpha = ball_radius(eps_b);
    Scratch s;
    const Objective f = [&](const std::vector<double>& x) {
        return eval_robust_cvr(inst, alpha, x[0], x[1], s);
    };
    const OptimResult r = minimize_outer(f, inst, opts);
    FitResult out;
    out.duals.p = r.x[0];
    out.duals.q = r.x[1];
    out.objective = r.fx;
    out.converged = r.converged;
    out.active = bid_side_set(PolicyKind::RobustCvr, inst, out.duals, 0.0, eps_b);
    return out;
}

FitResult fit_duals_joint(const FitInstance& inst, double eps_a, double eps_b,
                          const FitOptions& opts) {
    check_instance(inst);
    const double r_a = ball_radius(eps_a);
    const double r_b = ball_radius(eps_b);
    Scratch s;

    if (r_a <= 0.0 && r_b <= 0.0) {
        FitResult out = fit_duals_nonrobust(inst, opts);
        out.duals.lambda_a = kLambdaCap;
        out.duals.lambda_b = kLambdaCap;
        out.active = bid_side_set(PolicyKind::RobustJoint, inst, out.duals, eps_a, eps_b);
        return out;
    }

    // Initial lambdas from the nominal win set; refined against the fitted
    // set below.
    double la = kLambdaCap;
    double lb = kLambdaCap;
    bool margin_hit = false;
    bool lambda_ok = true;
    {
        // No duals yet, so the full horizon stands in for the active set.
        std::vector<char> seed(inst.ctr.size(), 1);
        if (opts.warm_start && 4.0 * opts.start.lambda_a * opts.start.lambda_b - 1.0 >= 1e-9) {
            la = opts.start.lambda_a;
            lb = opts.start.lambda_b;
        } else {
            const LambdaSolution init = solve_lambdas(inst.ctr, inst.cvr, seed, r_a, r_b);
            la = init.lambda_a;
            lb = init.lambda_b;
            margin_hit = init.margin_hit;
            lambda_ok = init.converged;
        }
    }

    const Objective f = [&](const std::vector<double>& x) {
        return eval_joint(inst, r_a, la, lb, x[0], x[1], s);
    };
    // The hinge dual drops the constant -la*ra^2 - lb*rb^2, but the lambda
    // updates need it: the saddle keeps the lambdas that maximize the fitted
    // dual net of the ball penalty. Re-solving the system on ever smaller
    // sets without this guard can walk the lambdas onto the margin, where A
    // blows up and empties the set entirely.
    auto saddle = [&](double fx, double a, double b) {
        return fx - a * r_a * r_a - b * r_b * r_b;
    };

    OptimResult best = minimize_outer(f, inst, opts);
    double g_best = saddle(best.fx, la, lb);

    FitOptions retry = opts;
    retry.quick = true;
    retry.warm_start = true;
    const int max_rounds = opts.quick ? 1 : 3;
    for (int round = 0; round < max_rounds; ++round) {
        // Re-solve the lambda system on the set the incumbent induced, then
        // accept the move only if the saddle value improves, damping toward
        // the incumbent otherwise.
        f(best.x);
        if (member_count(s.member) == 0) break;
        const LambdaSolution sol = solve_lambdas(inst.ctr, inst.cvr, s.member, r_a, r_b);
        const double rel = std::max(std::abs(sol.lambda_a - la) / std::max(la, 1e-12),
                                    std::abs(sol.lambda_b - lb) / std::max(lb, 1e-12));
        if (rel < 1e-6) {
            margin_hit = sol.margin_hit;
            lambda_ok = sol.converged;
            break;
        }
        bool accepted = false;
        for (double step : {1.0, 0.5, 0.25}) {
            double ca = std::exp(std::log(la) + step * (std::log(sol.lambda_a) - std::log(la)));
            double cb = std::exp(std::log(lb) + step * (std::log(sol.lambda_b) - std::log(lb)));
            if (4.0 * ca * cb < 1.0 + kLambdaMargin) {
                const double scale = std::sqrt((1.0 + kLambdaMargin) / (4.0 * ca * cb));
                ca *= scale;
                cb *= scale;
            }
            const double pa = la;
            const double pb = lb;
            la = ca;
            lb = cb;
            retry.start = DualVars{best.x[0], best.x[1], ca, cb};
            const OptimResult cand = minimize_outer(f, inst, retry);
            const double g_cand = saddle(cand.fx, ca, cb);
            if (g_cand > g_best) {
                best = cand;
                g_best = g_cand;
                margin_hit = sol.margin_hit;
                lambda_ok = sol.converged;
                accepted = true;
                break;
            }
            la = pa;
            lb = pb;
        }
        if (!accepted) break;
    }

    FitResult out;
    out.duals = DualVars{best.x[0], best.x[1], la, lb};
    out.objective = eval_joint(inst, r_a, la, lb, best.x[0], best.x[1], s);
    out.converged = best.converged;
    out.lambda_converged = lambda_ok;
    out.lambda_margin_hit = margin_hit;
    out.active = bid_side_set(PolicyKind::RobustJoint, inst, out.duals, eps_a, eps_b);
    return out;
}

double dual_objective_nonrobust(const FitInstance& inst, const DualVars& duals) {
    check_instance(inst);
    Scratch s;
    return eval_nonrobust(inst, duals.p, duals.q, s);
}

double dual_objective_robust_ctr(const FitInstance& inst, double eps_a, const DualVars& duals) {
    check_instance(inst);
    Scratch s;
    return eval_robust_ctr(inst, ball_radius(eps_a), duals.p, duals.q, s);
}

double dual_objective_robust_cvr(const FitInstance& inst, double eps_b, const DualVars& duals) {
    check_instance(inst);
    Scratch s;
    return eval_robust_cvr(inst, ball_radius(eps_b), duals.p, duals.q, s);
}

double dual_objective_joint(const FitInstance& inst, double eps_a, double eps_b,
                            const DualVars& duals) {
    (void)eps_b;  // printed objective uses the CTR-side radius; eps_b shapes the lambdas
    check_instance(inst);
    require_lambda_margin(duals);
    Scratch s;
    return eval_joint(inst, ball_radius(eps_a), duals.lambda_a, duals.lambda_b, duals.p, duals.q,
                      s);
}

double dual_certificate_joint(const FitInstance& inst, double eps_a, double eps_b,
                              const DualVars& duals) {
    check_instance(inst);
    require_lambda_margin(duals);
    const double r_a = ball_radius(eps_a);
    const double r_b = ball_radius(eps_b);
    Scratch s;
    eval_joint(inst, r_a, duals.lambda_a, duals.lambda_b, duals.p, duals.q, s);

    // Descend both balls on the fitted set by alternating exact steps from
    // the centers, then price the whole instance at that fixed perturbation.
    // A fixed in-ball rate vector turns the problem into a plain instance, so
    // the resulting value bounds the worst case from above for any feasible
    // multipliers.
    const std::size_t n = inst.ctr.size();
    std::vector<double> a(inst.ctr);
    std::vector<double> b(inst.cvr);
    double value = 0.0;
    for (std::size_t t = 0; t < n; ++t)
        if (s.member[t]) value += a[t] * b[t];
    for (int iter = 0; iter < 50; ++iter) {
        double norm_sq = 0.0;
        for (std::size_t t = 0; t < n; ++t)
            if (s.member[t]) norm_sq += b[t] * b[t];
        if (r_a > 0.0 && norm_sq > 0.0) {
            const double scale = r_a / std::sqrt(norm_sq);
            for (std::size_t t = 0; t < n; ++t)
                a[t] = inst.ctr[t] - (s.member[t] ? scale * b[t] : 0.0);
        }
        norm_sq = 0.0;
        for (std::size_t t = 0; t < n; ++t)
            if (s.member[t]) norm_sq += a[t] * a[t];
        if (r_b > 0.0 && norm_sq > 0.0) {
            const double scale = r_b / std::sqrt(norm_sq);
            for (std::size_t t = 0; t < n; ++t)
                b[t] = inst.cvr[t] - (s.member[t] ? scale * a[t] : 0.0);
        }
        double next = 0.0;
        for (std::size_t t = 0; t < n; ++t)
            if (s.member[t]) next += a[t] * b[t];
        if (value - next < 1e-15) {
            value = next;
            break;
        }
        value = next;
    }

    double obj = duals.p * inst.budget;
    for (std::size_t t = 0; t < n; ++t) {
        const double h = a[t] * b[t] - (duals.p + duals.q) * inst.wp[t] +
                         inst.cpc_cap * duals.q * a[t];
        obj += std::max(0.0, h);
    }
    return obj;
}

LambdaSolution solve_lambdas(const RateVector& ctr, const RateVector& cvr,
                             const std::vector<char>& active, double r_a, double r_b) {
    if (ctr.size() != cvr.size() || ctr.size() != active.size())
        throw std::invalid_argument("lambda system vectors disagree in length");
    LambdaSolution sol;
    const double ra_sq = r_a * r_a;
    const double rb_sq = r_b * r_b;
    const bool need_a = ra_sq > 1e-18;
    const bool need_b = rb_sq > 1e-18;

    double sc2 = 0.0;
    double sv2 = 0.0;
    int k = 0;
    for (std::size_t t = 0; t < active.size(); ++t) {
        if (!active[t]) continue;
        ++k;
        sc2 += ctr[t] * ctr[t];
        sv2 += cvr[t] * cvr[t];
    }

    double la = kLambdaCap;
    double lb = kLambdaCap;
    sol.lambda_a = la;
    sol.lambda_b = lb;
    if (k == 0 || (!need_a && !need_b)) return sol;

    // Asymptotic decoupled solution; exact as the radii shrink.
    if (need_a) la = std::clamp(std::sqrt(std::max(sv2, 1e-12) / (2.0 * ra_sq)), kLambdaFloor, kLambdaCap);
    if (need_b) lb = std::clamp(std::sqrt(std::max(sc2, 1e-12) / (2.0 * rb_sq)), kLambdaFloor, kLambdaCap);

    const double tol = 1e-9 * (ra_sq + rb_sq) + 1e-15;
    const double fd = 1e-5;
    bool converged = false;
    for (int iter = 0; iter < 60; ++iter) {
        const StationarityResidual r0 =
            stationarity(ctr, cvr, active, la, lb, ra_sq, rb_sq);
        if (!r0.valid) break;
        const double err = std::max(need_a ? std::abs(r0.ra) : 0.0,
                                    need_b ? std::abs(r0.rb) : 0.0);
        if (err <= tol) {
            converged = true;
            break;
        }
        // Damped Newton in log space with a finite-difference Jacobian.
        const double za = std::log(la);
        const double zb = std::log(lb);
        double j[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
        if (need_a) {
            const StationarityResidual rp =
                stationarity(ctr, cvr, active, std::exp(za + fd), lb, ra_sq, rb_sq);
            const StationarityResidual rm =
                stationarity(ctr, cvr, active, std::exp(za - fd), lb, ra_sq, rb_sq);
            if (!rp.valid || !rm.valid) break;
            j[0][0] = (rp.ra - rm.ra) / (2.0 * fd);
            j[1][0] = (rp.rb - rm.rb) / (2.0 * fd);
        }
        if (need_b) {
            const StationarityResidual rp =
                stationarity(ctr, cvr, active, la, std::exp(zb + fd), ra_sq, rb_sq);
            const StationarityResidual rm =
                stationarity(ctr, cvr, active, la, std::exp(zb - fd), ra_sq, rb_sq);
            if (!rp.valid || !rm.valid) break;
            j[0][1] = (rp.ra - rm.ra) / (2.0 * fd);
            j[1][1] = (rp.rb - rm.rb) / (2.0 * fd);
        }

        double da = 0.0;
        double db = 0.0;
        if (need_a && need_b) {
            const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if (std::abs(det) < 1e-30) break;
            da = -(r0.ra * j[1][1] - r0.rb * j[0][1]) / det;
            db = -(j[0][0] * r0.rb - j[1][0] * r0.ra) / det;
        } else if (need_a) {
            if (std::abs(j[0][0]) < 1e-30) break;
            da = -r0.ra / j[0][0];
        } else {
            if (std::abs(j[1][1]) < 1e-30) break;
            db = -r0.rb / j[1][1];
        }
        da = std::clamp(da, -2.0, 2.0);
        db = std::clamp(db, -2.0, 2.0);

        double step = 1.0;
        bool moved = false;
        for (int half = 0; half < 8; ++half) {
            const double na = std::clamp(std::exp(za + step * da), kLambdaFloor, kLambdaCap);
            const double nb = std::clamp(std::exp(zb + step * db), kLambdaFloor, kLambdaCap);
            const StationarityResidual rn =
                stationarity(ctr, cvr, active, na, nb, ra_sq, rb_sq);
            if (rn.valid) {
                const double nerr = std::max(need_a ? std::abs(rn.ra) : 0.0,
                                             need_b ? std::abs(rn.rb) : 0.0);
                if (nerr < err) {
                    la = na;
                    lb = nb;
                    moved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!moved) break;
    }

    if (4.0 * la * lb < 1.0 + kLambdaMargin) {
        const double scale = std::sqrt((1.0 + kLambdaMargin) / (4.0 * la * lb));
        la *= scale;
        lb *= scale;
        sol.margin_hit = true;
        // Stationarity cannot hold on the wrong side of the margin; the
        // projected point is the constrained stationary choice.
        converged = true;
    }
    sol.lambda_a = la;
    sol.lambda_b = lb;
    sol.converged = converged;
    return sol;
}

}  // namespace robustbid
