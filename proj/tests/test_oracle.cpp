#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "robustbid/oracle.hpp"
#include "robustbid/rng.hpp"
#include "robustbid/uncertainty.hpp"

using namespace robustbid;

TEST_CASE("numeric ball minimizer matches the closed form") {
    Rng rng(101);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 7);
        RateVector pred(n);
        RateVector w(n);
        for (auto& v : pred) v = rng.uniform(0.1, 0.9);
        for (auto& v : w) v = rng.uniform(0.1, 2.0);
        const double eps = rng.uniform(1e-5, 5e-3);

        const oracle::BallMinimizerResult num = oracle::numeric_ball_minimizer(pred, w, eps);
        const RateVector closed = worst_case_rates(pred, w, eps);
        double closed_obj = 0.0;
        for (std::size_t i = 0; i < n; ++i) closed_obj += w[i] * closed[i];

        CHECK(num.converged);
        CHECK(num.objective == doctest::Approx(closed_obj).epsilon(1e-8));
        for (std::size_t i = 0; i < n; ++i)
            CHECK(num.argmin[i] == doctest::Approx(closed[i]).epsilon(1e-6));
    }
}

TEST_CASE("numeric ball minimizer with zero weights stays at the center") {
    const RateVector pred{0.4, 0.6};
    const oracle::BallMinimizerResult r = oracle::numeric_ball_minimizer(pred, {0.0, 0.0}, 0.1);
    CHECK(r.converged);
    CHECK(r.objective == 0.0);
    CHECK(r.argmin[0] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(r.argmin[1] == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("brute force primal on a hand-checked instance") {
    oracle::PrimalInstance inst;
    inst.ctr = {0.1, 0.2};
    inst.cvr = {0.5, 0.5};
    inst.wp = {0.04, 0.07};
    inst.budget = 0.08;
    inst.cpc_cap = 1.0;
    inst.mode = oracle::PrimalMode::NonRobust;

    // Feasible allocations: {}, {0}, {1}; both together overshoot the budget.
    const oracle::PrimalResult res = oracle::brute_force_primal(inst);
    CHECK(res.n_feasible == 3);
    CHECK(res.best_value == doctest::Approx(0.1).epsilon(1e-12));
    REQUIRE(res.best_x.size() == 2);
    CHECK(res.best_x[0] == 0);
    CHECK(res.best_x[1] == 1);
}

TEST_CASE("brute force primal rejects instances too large to enumerate") {
    oracle::PrimalInstance inst;
    inst.ctr.assign(13, 0.1);
    inst.cvr.assign(13, 0.1);
    inst.wp.assign(13, 0.01);
    inst.budget = 1.0;
    inst.cpc_cap = 1.0;
    CHECK_THROWS_AS(oracle::brute_force_primal(inst), std::invalid_argument);

    inst.ctr.assign(9, 0.1);
    inst.cvr.assign(9, 0.1);
    inst.wp.assign(9, 0.01);
    inst.mode = oracle::PrimalMode::RobustJoint;
    CHECK_THROWS_AS(oracle::brute_force_primal(inst), std::invalid_argument);
}

TEST_CASE("joint worst case degenerates to known forms at zero radius") {
    const RateVector ctr{0.3, 0.5, 0.2};
    const RateVector cvr{0.4, 0.1, 0.6};
    const std::vector<char> x{1, 0, 1};

    SUBCASE("both radii zero gives the nominal value") {
        const double v = oracle::joint_worst_case_value(x, ctr, cvr, 0.0, 0.0, 5);
        CHECK(v == doctest::Approx(0.3 * 0.4 + 0.2 * 0.6).epsilon(1e-12));
    }
    SUBCASE("cvr radius zero reduces to the single-ball closed form") {
        const double r_a = 0.05;
        const double v = oracle::joint_worst_case_value(x, ctr, cvr, r_a, 0.0, 5);
        const double nominal = 0.3 * 0.4 + 0.2 * 0.6;
        const double dir = std::sqrt(0.4 * 0.4 + 0.6 * 0.6);
        CHECK(v == doctest::Approx(nominal - r_a * dir).epsilon(1e-9));
    }
}

TEST_CASE("psd spot checks") {
    // la*lb = 0.25 = max(x)^2 / 4: exactly on the boundary.
    CHECK(oracle::psd_check(0.5, 0.5, {1.0, 0.5}));
    CHECK(oracle::psd_scalar_condition(0.5, 0.5, {1.0, 0.5}));

    // la*lb = 0.2 < 0.25: indefinite.
    CHECK(!oracle::psd_check(0.5, 0.4, {1.0}));
    CHECK(!oracle::psd_scalar_condition(0.5, 0.4, {1.0}));

    // [[1, 1/2], [1/2, 1]] has eigenvalues 1/2 and 3/2.
    CHECK(oracle::psd_min_eigenvalue(1.0, 1.0, {1.0}) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("psd matrix and scalar conditions agree on random triples") {
    Rng rng(113);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 6);
        std::vector<double> x(n);
        for (auto& v : x) v = rng.uniform(0.0, 1.0);
        double la = rng.uniform(0.0, 1.5);
        double lb = rng.uniform(0.0, 1.5);
        if (trial % 4 == 1) {
            // Hug the boundary where disagreement would show up first.
            double mx = 0.0;
            for (double v : x) mx = std::max(mx, v);
            if (la > 1e-6) lb = mx * mx / (4.0 * la) * rng.uniform(0.95, 1.05);
        }
        CHECK(oracle::psd_check(la, lb, x) == oracle::psd_scalar_condition(la, lb, x));
    }
}
