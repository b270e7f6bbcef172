#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "robustbid/bidding.hpp"
#include "robustbid/rng.hpp"

using namespace robustbid;

namespace {

DualVars make_duals(double p, double q, double la = 0.0, double lb = 0.0) {
    DualVars d;
    d.p = p;
    d.q = q;
    d.lambda_a = la;
    d.lambda_b = lb;
    return d;
}

}  // namespace

TEST_CASE("non-robust bid formula") {
    CHECK(bid_nonrobust(make_duals(1.0, 0.0), 1.0, 0.1, 0.05) ==
          doctest::Approx(0.005).epsilon(1e-12));
    CHECK(bid_nonrobust(make_duals(0.0, 1.0), 1.0, 0.1, 0.05) ==
          doctest::Approx(0.105).epsilon(1e-12));
    CHECK(bid_nonrobust(make_duals(1.0, 1.0), 2.0, 0.1, 0.1) ==
          doctest::Approx(0.105).epsilon(1e-12));
    CHECK_THROWS_AS(bid_nonrobust(make_duals(0.0, 0.0), 1.0, 0.1, 0.1), std::invalid_argument);
}

TEST_CASE("risk bid haircuts the click rate") {
    const DualVars d = make_duals(1.0, 1.0);
    CHECK(bid_risk(d, 1.0, 0.1, 0.02, 1.0, 0.1) == doctest::Approx(0.044).epsilon(1e-12));

    // Haircut exceeding the rate floors the effective CTR, and the bid, at 0.
    CHECK(bid_risk(d, 1.0, 0.1, 0.2, 1.0, 0.1) == 0.0);

    // alpha = 0 disables the haircut entirely.
    CHECK(bid_risk(d, 1.5, 0.3, 0.07, 0.0, 0.2) ==
          doctest::Approx(bid_nonrobust(d, 1.5, 0.3, 0.2)).epsilon(1e-15));
}

TEST_CASE("joint certificate A term") {
    // At lambda_a = lambda_b = 1 and equal rates c the term reduces to 10c^2/9.
    CHECK(joint_A_term(1.0, 1.0, 0.3, 0.3) == doctest::Approx(0.1).epsilon(1e-12));

    // 4*la*lb = 1 makes the denominator vanish.
    CHECK_THROWS_AS(joint_A_term(0.5, 0.5, 0.3, 0.3), SingularDenominator);
    CHECK_THROWS_AS(joint_inner_f(1.0, 0.5, 0.5, 0.3, 0.3), SingularDenominator);

    // Far from the pole the term decays like 1/lambda.
    const double a3 = joint_A_term(1e3, 1e3, 0.2, 0.4);
    const double a4 = joint_A_term(1e4, 1e4, 0.2, 0.4);
    CHECK(a4 / a3 == doctest::Approx(0.1).epsilon(0.2));
}

TEST_CASE("joint A term is nonnegative on the feasible lambda region") {
    // la*c^2 + lb*v^2 >= sqrt(4*la*lb)*c*v pins the term above zero whenever
    // 4*la*lb > 1, so the delta clamp is purely defensive.
    Rng rng(37);
    for (int trial = 0; trial < 500; ++trial) {
        const double la = rng.uniform(0.05, 5.0);
        const double lb = (1.0 + rng.uniform(1e-3, 8.0)) / (4.0 * la);
        const double c = rng.uniform(0.0, 1.0);
        const double v = rng.uniform(0.0, 1.0);
        CHECK(joint_A_term(la, lb, c, v) >= 0.0);
    }
}

TEST_CASE("per-item corrections") {
    const DualVars d = make_duals(1.0, 1.0);
    CHECK(delta_ctr(d, 1.0, 0.1, 0.005, 1, 0.01) == doctest::Approx(-0.055).epsilon(1e-12));
    CHECK(delta_cvr(d, 0.2, 0.02, 0.04) == doctest::Approx(-0.1).epsilon(1e-12));

    // Empty set carries no correction.
    CHECK(delta_ctr(d, 1.0, 0.1, 0.005, 0, 0.0) == 0.0);
    CHECK(delta_cvr(d, 0.2, 0.02, 0.0) == 0.0);
    CHECK(delta_joint(d, 0.1, 0.1, 0.005, 0) == 0.0);

    // Larger uncertainty widens every correction.
    CHECK(delta_ctr(d, 1.0, 0.1, 0.02, 3, 0.05) < delta_ctr(d, 1.0, 0.1, 0.005, 3, 0.05));
    CHECK(delta_cvr(d, 0.2, 0.08, 0.04) < delta_cvr(d, 0.2, 0.02, 0.04));
    const DualVars dj = make_duals(1.0, 1.0, 1.0, 1.0);
    CHECK(delta_joint(dj, 0.2, 0.3, 0.02, 4) < delta_joint(dj, 0.2, 0.3, 0.005, 4));
}

TEST_CASE("active set extremes") {
    const DualVars d = make_duals(1.0, 1.0);
    const RateVector ctr{0.2, 0.3, 0.4};
    const RateVector cvr{0.1, 0.2, 0.3};

    SUBCASE("prices above every bid empty the set") {
        const ActiveSet s = active_set_ctr(d, 1.0, ctr, cvr, {5.0, 5.0, 5.0}, 0.01);
        CHECK(s.count == 0);
        CHECK(s.converged);
        CHECK(s.sum_cvr_sq == 0.0);
    }
    SUBCASE("free auctions and zero radius keep everything") {
        const ActiveSet s = active_set_ctr(d, 1.0, ctr, cvr, {0.0, 0.0, 0.0}, 0.0);
        CHECK(s.count == 3);
        CHECK(s.converged);
        CHECK(s.sum_cvr_sq == doctest::Approx(0.01 + 0.04 + 0.09).epsilon(1e-12));
        CHECK(s.sum_ctr_sq == doctest::Approx(0.04 + 0.09 + 0.16).epsilon(1e-12));
    }
    SUBCASE("joint set rejects singular lambdas") {
        const DualVars bad = make_duals(1.0, 1.0, 0.5, 0.5);
        CHECK_THROWS_AS(active_set_joint(bad, 1.0, ctr, cvr, {0.1, 0.1, 0.1}, 0.01, 0.01),
                        SingularDenominator);
    }
    SUBCASE("zero duals are rejected") {
        CHECK_THROWS_AS(active_set_ctr(make_duals(0.0, 0.0), 1.0, ctr, cvr, {0.1, 0.1, 0.1}, 0.01),
                        std::invalid_argument);
    }
}

TEST_CASE("zero radius collapses every policy to the non-robust bid") {
    Rng rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 6;
        RateVector ctr(n), cvr(n);
        std::vector<double> wp(n);
        for (auto& v : ctr) v = rng.uniform(0.05, 0.6);
        for (auto& v : cvr) v = rng.uniform(0.05, 0.6);
        for (auto& v : wp) v = rng.uniform(0.0, 0.2);
        const DualVars d = make_duals(rng.uniform(0.1, 2.0), rng.uniform(0.1, 2.0), 1.0, 1.0);
        const double cap = rng.uniform(0.5, 2.0);

        const auto ctr_bids = bids_robust_ctr(d, cap, ctr, cvr, wp, 0.0);
        const auto cvr_bids = bids_robust_cvr(d, cap, ctr, cvr, wp, 0.0);
        const auto joint_bids = bids_robust_joint(d, cap, ctr, cvr, wp, 0.0, 0.0);
        for (std::size_t t = 0; t < n; ++t) {
            const double base = bid_nonrobust(d, cap, ctr[t], cvr[t]);
            CHECK(std::abs(ctr_bids[t].bid - base) <= 1e-9);
            CHECK(std::abs(cvr_bids[t].bid - base) <= 1e-9);
            CHECK(std::abs(joint_bids[t].bid - base) <= 1e-9);
        }
    }
}

TEST_CASE("robust bids never exceed the base bid") {
    Rng rng(43);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 8;
        RateVector ctr(n), cvr(n);
        std::vector<double> wp(n);
        for (auto& v : ctr) v = rng.uniform(0.05, 0.6);
        for (auto& v : cvr) v = rng.uniform(0.05, 0.6);
        for (auto& v : wp) v = rng.uniform(0.0, 0.15);
        const DualVars d = make_duals(rng.uniform(0.1, 2.0), rng.uniform(0.1, 2.0), 1.2, 1.1);
        const double ea = rng.uniform(1e-4, 5e-3);
        const double eb = rng.uniform(1e-4, 5e-3);

        for (const auto& bids : {bids_robust_ctr(d, 1.0, ctr, cvr, wp, ea),
                                 bids_robust_cvr(d, 1.0, ctr, cvr, wp, eb),
                                 bids_robust_joint(d, 1.0, ctr, cvr, wp, ea, eb)}) {
            for (const auto& b : bids) {
                CHECK(b.delta <= 0.0);
                CHECK(b.bid <= b.base_bid + 1e-15);
                CHECK(b.bid >= 0.0);
                if (!b.active) CHECK(b.delta == 0.0);
            }
        }
    }
    CHECK_THROWS_AS(bids_robust_ctr(make_duals(1.0, 1.0), 1.0, {0.1}, {0.1}, {0.1}, -1e-3),
                    std::invalid_argument);
}

TEST_CASE("converged active sets satisfy the membership equation") {
    // Independent restatement of the fixed point: t belongs to the set iff
    // its base margin survives the discount computed from that same set.
    Rng rng(47);
    int nontrivial = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 10;
        RateVector ctr(n), cvr(n);
        std::vector<double> wp(n);
        const DualVars d = make_duals(1.0, 1.0);
        const double cap = 1.0;
        const double eps_a = 0.002;
        for (std::size_t t = 0; t < n; ++t) {
            ctr[t] = rng.uniform(0.1, 0.6);
            cvr[t] = rng.uniform(0.1, 0.6);
            wp[t] = bid_nonrobust(d, cap, ctr[t], cvr[t]) * rng.uniform(0.7, 1.3);
        }

        const ActiveSet s = active_set_ctr(d, cap, ctr, cvr, wp, eps_a);
        if (!s.converged || s.cycled) continue;
        if (s.count > 0 && s.count < static_cast<int>(n)) ++nontrivial;

        for (std::size_t t = 0; t < n; ++t) {
            const double margin = bid_nonrobust(d, cap, ctr[t], cvr[t]) - wp[t];
            const double corrected =
                margin + delta_ctr(d, cap, cvr[t], eps_a, s.count, s.sum_cvr_sq);
            CHECK((s.member[t] != 0) == (corrected >= 0.0));
        }

        // The set the bid assembly reports must be the one it discounts with.
        const auto bids = bids_robust_ctr(d, cap, ctr, cvr, wp, eps_a);
        for (std::size_t t = 0; t < n; ++t) {
            CHECK(bids[t].active == (s.member[t] != 0));
            if (bids[t].active)
                CHECK(bids[t].delta ==
                      doctest::Approx(delta_ctr(d, cap, cvr[t], eps_a, s.count, s.sum_cvr_sq))
                          .epsilon(1e-12));
        }
    }
    // The margins straddle zero by construction, so partial sets must occur.
    CHECK(nontrivial > 10);
}

TEST_CASE("returned set appears among all self-consistent subsets") {
    const std::size_t n = 10;
    Rng rng(53);
    RateVector ctr(n), cvr(n);
    std::vector<double> wp(n);
    const DualVars d = make_duals(1.0, 1.0);
    const double cap = 1.0;
    const double eps_a = 0.003;
    for (std::size_t t = 0; t < n; ++t) {
        ctr[t] = rng.uniform(0.1, 0.6);
        cvr[t] = rng.uniform(0.1, 0.6);
        wp[t] = bid_nonrobust(d, cap, ctr[t], cvr[t]) * rng.uniform(0.8, 1.2);
    }
    const ActiveSet s = active_set_ctr(d, cap, ctr, cvr, wp, eps_a);
    REQUIRE(s.converged);
    REQUIRE(!s.cycled);

    bool found = false;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        int count = 0;
        double sum_cvr_sq = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            if (mask & (1u << t)) {
                ++count;
                sum_cvr_sq += cvr[t] * cvr[t];
            }
        }
        bool consistent = true;
        for (std::size_t t = 0; t < n && consistent; ++t) {
            const double margin = bid_nonrobust(d, cap, ctr[t], cvr[t]) - wp[t];
            const bool stays = margin + delta_ctr(d, cap, cvr[t], eps_a, count, sum_cvr_sq) >= 0.0;
            consistent = stays == ((mask & (1u << t)) != 0);
        }
        if (!consistent) continue;
        bool same = true;
        for (std::size_t t = 0; t < n; ++t)
            same = same && ((mask & (1u << t)) != 0) == (s.member[t] != 0);
        found = found || same;
    }
    CHECK(found);
}
