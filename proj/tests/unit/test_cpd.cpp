#include "uqx/cpd.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <limits>
#include <vector>

using uqx::ConformalPredictiveDistribution;
using uqx::IntervalSide;
using uqx::TiePolicy;

namespace {

ConformalPredictiveDistribution fixture() {
    const std::vector<double> residuals = {-1.0, 1.0, 0.0};
    return ConformalPredictiveDistribution(residuals, 10.0);
}

} // namespace

TEST_CASE("c-values are the sorted shifted residuals") {
    const ConformalPredictiveDistribution cpd = fixture();
    CHECK(cpd.c_values() == std::vector<double>{9.0, 10.0, 11.0});
    CHECK(cpd.point_prediction() == 10.0);
}

TEST_CASE("hand-evaluated queries on {9,10,11}") {
    const ConformalPredictiveDistribution cpd = fixture();
    CHECK(cpd.evaluate(9.5) == 0.375);  // open interval branch, i = 1
    CHECK(cpd.evaluate(10.0) == 0.5);   // tie branch, i' = i'' = 2
    CHECK(cpd.threshold_prob(20.0) == 0.875);
    CHECK(cpd.threshold_prob(8.0) == 0.125);
    CHECK(cpd.median() == 10.0);
}

TEST_CASE("two-sided interval and underflow") {
    const ConformalPredictiveDistribution cpd = fixture();
    const auto [low, high] = cpd.interval_two_sided(0.5);
    CHECK(low == 9.0);
    CHECK(high == 11.0);
    CHECK_THROWS_WITH_AS(cpd.interval_two_sided(0.05), "insufficient calibration data for epsilon",
                         std::invalid_argument);
}

TEST_CASE("one-sided intervals") {
    const ConformalPredictiveDistribution cpd = fixture();
    const auto [lo1, hi1] = cpd.interval_one_sided(0.25, IntervalSide::lower_bounded);
    CHECK(lo1 == 9.0);
    CHECK(hi1 == std::numeric_limits<double>::infinity());
    const auto [lo2, hi2] = cpd.interval_one_sided(0.25, IntervalSide::upper_bounded);
    CHECK(lo2 == -std::numeric_limits<double>::infinity());
    CHECK(hi2 == 11.0);
    CHECK_THROWS_AS(cpd.interval_one_sided(0.01, IntervalSide::lower_bounded),
                    std::invalid_argument);
}

TEST_CASE("median of an even-sized calibration set") {
    const std::vector<double> residuals = {0.0, 2.0};
    const ConformalPredictiveDistribution cpd(residuals, 5.0);
    CHECK(cpd.median() == 6.0);
}

TEST_CASE("median equals the prediction for symmetric residuals") {
    const std::vector<double> residuals = {-2.0, -1.0, 0.0, 1.0, 2.0};
    const ConformalPredictiveDistribution cpd(residuals, 42.0);
    CHECK(cpd.median() == 42.0);
}

TEST_CASE("monotone and bounded on a grid") {
    const std::vector<double> residuals = {-3.0, -1.0, -1.0, 0.0, 0.5, 2.0, 2.0, 2.0, 4.0};
    const ConformalPredictiveDistribution cpd(residuals, 1.0);
    double prev = -1.0;
    for (double y = -5.0; y <= 8.0; y += 0.05) {
        const double v = cpd.evaluate(y);
        CHECK(v >= prev);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        prev = v;
    }
    const double q1 = static_cast<double>(residuals.size()) + 1.0;
    CHECK(cpd.evaluate(-1e12) == 0.5 / q1);
    CHECK(cpd.evaluate(1e12) == (static_cast<double>(residuals.size()) + 0.5) / q1);
}

TEST_CASE("seeded tie policy is deterministic per seed and query") {
    const std::vector<double> residuals = {-1.0, 0.0, 1.0};
    const ConformalPredictiveDistribution a(residuals, 10.0, TiePolicy::seeded_random, 99);
    const ConformalPredictiveDistribution b(residuals, 10.0, TiePolicy::seeded_random, 99);
    const ConformalPredictiveDistribution c(residuals, 10.0, TiePolicy::seeded_random, 100);
    CHECK(a.evaluate(10.0) == b.evaluate(10.0));
    CHECK(a.evaluate(10.0) != c.evaluate(10.0));
    // Values remain valid CPD outputs.
    CHECK(a.evaluate(10.0) >= 0.0);
    CHECK(a.evaluate(10.0) <= 1.0);
}

TEST_CASE("empty residuals are rejected") {
    CHECK_THROWS_WITH_AS(ConformalPredictiveDistribution({}, 0.0), "no calibration residuals",
                         std::invalid_argument);
}
