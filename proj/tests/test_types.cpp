#include <stdexcept>

#include "doctest.h"
#include "robustbid/types.hpp"

using namespace robustbid;

TEST_CASE("policy names round-trip") {
    const PolicyKind kinds[] = {PolicyKind::NonRobust, PolicyKind::Risk, PolicyKind::RobustCtr,
                                PolicyKind::RobustCvr, PolicyKind::RobustJoint};
    for (PolicyKind k : kinds) {
        const auto parsed = parse_policy(to_string(k));
        REQUIRE(parsed.has_value());
        CHECK(*parsed == k);
    }
    CHECK(!parse_policy("gsp").has_value());
    CHECK(!parse_policy("").has_value());
}

TEST_CASE("rate validation rejects values outside the unit interval") {
    CHECK_NOTHROW(validate_rates({0.0, 0.5, 1.0}, "ctr"));
    CHECK_THROWS_AS(validate_rates({0.5, 1.5}, "ctr"), std::invalid_argument);
    CHECK_THROWS_AS(validate_rates({-0.1}, "cvr"), std::invalid_argument);
    try {
        validate_rates({0.2, 2.0}, "ctr_true");
        FAIL("expected a throw");
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        CHECK(msg.find("ctr_true") != std::string::npos);
        CHECK(msg.find("[1]") != std::string::npos);
    }
}

TEST_CASE("run flags stay sorted and distinct") {
    SimulationState state;
    state.add_flag("fit_nonconverged");
    state.add_flag("aset_nonconverged");
    state.add_flag("fit_nonconverged");
    state.add_flag("delta_clamped");
    REQUIRE(state.flags.size() == 3);
    CHECK(state.flags[0] == "aset_nonconverged");
    CHECK(state.flags[1] == "delta_clamped");
    CHECK(state.flags[2] == "fit_nonconverged");
}
