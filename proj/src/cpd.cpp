#include "uqx/cpd.hpp"

#include "uqx/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

namespace uqx {

ConformalPredictiveDistribution::ConformalPredictiveDistribution(std::span<const double> residuals,
                                                                 double point_prediction,
                                                                 TiePolicy tie, std::uint64_t seed)
    : point_prediction_(point_prediction), tie_(tie), seed_(seed) {
    if (residuals.empty()) throw std::invalid_argument("no calibration residuals");
    c_values_.reserve(residuals.size());
    for (double r : residuals) c_values_.push_back(point_prediction + r);
    std::sort(c_values_.begin(), c_values_.end());
}

namespace detail {

double cpd_tie_value(TiePolicy tie, std::uint64_t seed, double y) {
    if (tie == TiePolicy::fixed_half) return 0.5;
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(y));
    std::memcpy(&bits, &y, sizeof(bits));
    return static_cast<double>(rng::splitmix64(seed ^ bits) >> 11) * 0x1.0p-53;
}

double cpd_evaluate_sorted(std::span<const double> sorted_c, double y, double tau) {
    const double q = static_cast<double>(sorted_c.size());
    const auto lo = std::lower_bound(sorted_c.begin(), sorted_c.end(), y);
    const auto hi = std::upper_bound(sorted_c.begin(), sorted_c.end(), y);
    if (lo == hi) {
        // y strictly between adjacent c-values; i counts values below y.
        const double i = static_cast<double>(lo - sorted_c.begin());
        return (i + tau) / (q + 1.0);
    }
    const double first = static_cast<double>(lo - sorted_c.begin()) + 1.0;
    const double last = static_cast<double>(hi - sorted_c.begin());
    return (first - 1.0 + (last - first + 2.0) * tau) / (q + 1.0);
}

} // namespace detail

double ConformalPredictiveDistribution::tie_value(double y) const {
    return detail::cpd_tie_value(tie_, seed_, y);
}

double ConformalPredictiveDistribution::evaluate(double y) const {
    return detail::cpd_evaluate_sorted(c_values_, y, tie_value(y));
}

std::pair<double, double> ConformalPredictiveDistribution::interval_two_sided(double epsilon) const {
    if (epsilon <= 0.0 || epsilon >= 1.0)
        throw std::invalid_argument("epsilon must lie in (0, 1)");
    const double q1 = static_cast<double>(c_values_.size()) + 1.0;
    const auto lo_idx = static_cast<long>(std::floor(epsilon / 2.0 * q1));
    const auto hi_idx = static_cast<long>(std::ceil((1.0 - epsilon / 2.0) * q1));
    if (lo_idx < 1 || hi_idx > static_cast<long>(c_values_.size()))
        throw std::invalid_argument("insufficient calibration data for epsilon");
    return {c_values_[static_cast<std::size_t>(lo_idx - 1)],
            c_values_[static_cast<std::size_t>(hi_idx - 1)]};
}

std::pair<double, double> ConformalPredictiveDistribution::interval_one_sided(
    double epsilon, IntervalSide side) const {
    if (epsilon <= 0.0 || epsilon >= 1.0)
        throw std::invalid_argument("epsilon must lie in (0, 1)");
    const double q1 = static_cast<double>(c_values_.size()) + 1.0;
    const double inf = std::numeric_limits<double>::infinity();
    if (side == IntervalSide::lower_bounded) {
        const auto idx = static_cast<long>(std::floor(epsilon * q1));
        if (idx < 1 || idx > static_cast<long>(c_values_.size()))
            throw std::invalid_argument("insufficient calibration data for epsilon");
        return {c_values_[static_cast<std::size_t>(idx - 1)], inf};
    }
    const auto idx = static_cast<long>(std::ceil((1.0 - epsilon) * q1));
    if (idx < 1 || idx > static_cast<long>(c_values_.size()))
        throw std::invalid_argument("insufficient calibration data for epsilon");
    return {-inf, c_values_[static_cast<std::size_t>(idx - 1)]};
}

double ConformalPredictiveDistribution::median() const {
    const double q1 = static_cast<double>(c_values_.size()) + 1.0;
    const auto up = static_cast<std::size_t>(std::ceil(0.5 * q1));
    const auto down = static_cast<std::size_t>(std::floor(0.5 * q1));
    return (c_values_[up - 1] + c_values_[down - 1]) / 2.0;
}

} // namespace uqx
