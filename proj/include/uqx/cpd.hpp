#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace uqx {

/// Tie handling for CPD evaluation. fixed_half keeps every query
/// deterministic; seeded_random derives the tie variable from the seed and
/// the query point, giving uniform ties without mutable state.
enum class TiePolicy { fixed_half, seeded_random };

enum class IntervalSide { lower_bounded, upper_bounded };

/// Cumulative conformal predictive distribution over possible targets,
/// built from sorted calibration-adjusted values. Immutable; concurrent
/// queries are safe.
class ConformalPredictiveDistribution {
public:
    ConformalPredictiveDistribution(std::span<const double> residuals, double point_prediction,
                                    TiePolicy tie = TiePolicy::fixed_half, std::uint64_t seed = 0);

    /// Estimated P(target <= y).
    double evaluate(double y) const;

    /// Two-sided symmetric interval at significance epsilon. Throws when the
    /// calibration set is too small for the requested epsilon.
    std::pair<double, double> interval_two_sided(double epsilon) const;

    /// One-sided interval; the unbounded end is +/- infinity.
    std::pair<double, double> interval_one_sided(double epsilon, IntervalSide side) const;

    /// Median of the distribution; a calibrated point prediction.
    double median() const;

    /// Estimated probability of the target lying at or below t.
    double threshold_prob(double t) const { return evaluate(t); }

    const std::vector<double>& c_values() const { return c_values_; }
    double point_prediction() const { return point_prediction_; }
    std::size_t size() const { return c_values_.size(); }

private:
    double tie_value(double y) const;

    std::vector<double> c_values_; // sorted non-decreasing
    double point_prediction_;
    TiePolicy tie_;
    std::uint64_t seed_;
};

namespace detail {

/// Core CPD evaluation over pre-sorted values with an explicit tie variable.
double cpd_evaluate_sorted(std::span<const double> sorted_c, double y, double tau);

/// Tie variable for a query under a policy: 0.5, or a uniform value derived
/// deterministically from the seed and the query's bit pattern.
double cpd_tie_value(TiePolicy tie, std::uint64_t seed, double y);

} // namespace detail

} // namespace uqx
