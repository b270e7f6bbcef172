#include <cmath>
#include <vector>

#include "doctest.h"
#include "robustbid/nelder_mead.hpp"

using namespace robustbid;

TEST_CASE("simplex descent solves a smooth quadratic") {
    const Objective f = [](const std::vector<double>& x) {
        const double dx = x[0] - 1.5;
        const double dy = x[1] - 0.25;
        return dx * dx + 3.0 * dy * dy;
    };
    const OptimResult r = nelder_mead(f, {0.0, 0.0});
    CHECK(r.fx == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(r.x[0] == doctest::Approx(1.5).epsilon(1e-3));
    CHECK(r.x[1] == doctest::Approx(0.25).epsilon(1e-3));
}

TEST_CASE("candidates are clamped to the nonnegative orthant") {
    const Objective f = [](const std::vector<double>& x) {
        const double dx = x[0] + 2.0;  // unconstrained optimum at -2
        return dx * dx + x[1] * x[1];
    };
    const OptimResult r = multistart_minimize(f, {{1.0, 1.0}, {0.0, 0.0}});
    CHECK(r.x[0] >= 0.0);
    CHECK(r.x[1] >= 0.0);
    CHECK(r.fx == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("compass refinement survives a kink") {
    const Objective f = [](const std::vector<double>& x) {
        return std::abs(x[0] - 0.3) + 2.0 * std::abs(x[1] - 0.7);
    };
    const OptimResult r = compass_refine(f, {0.0, 0.0}, 0.25, 1e-10);
    CHECK(r.fx == doctest::Approx(0.0).epsilon(1e-7));
    CHECK(r.x[0] == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(r.x[1] == doctest::Approx(0.7).epsilon(1e-6));
}

TEST_CASE("multistart escapes a poor basin") {
    // Two basins; the deeper one sits far from the origin start.
    const Objective f = [](const std::vector<double>& x) {
        const double near = (x[0] - 0.1) * (x[0] - 0.1) + 0.5;
        const double far = (x[0] - 20.0) * (x[0] - 20.0) * 0.01;
        return std::min(near, far) + x[1] * x[1];
    };
    const OptimResult r = multistart_minimize(f, {{0.0, 0.0}, {1.0, 0.0}, {25.0, 0.0}});
    CHECK(r.fx == doctest::Approx(0.0).epsilon(1e-4));
    CHECK(r.x[0] == doctest::Approx(20.0).epsilon(1e-2));
}
