#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace uqx {

/// Least-squares non-decreasing fit produced by pool-adjacent-violators.
///
/// Breakpoints hold one (score, fitted value) pair per distinct score; for
/// duplicate scores the value of the last point in stable sorted order wins.
/// Evaluation uses right-continuous step semantics: the value of the last
/// breakpoint with score <= s, or the first value when s lies below all
/// breakpoints.
class IsotonicFit {
public:
    explicit IsotonicFit(std::vector<std::pair<double, double>> breakpoints);

    double operator()(double score) const;

    const std::vector<std::pair<double, double>>& breakpoints() const { return breakpoints_; }

private:
    std::vector<std::pair<double, double>> breakpoints_;
};

/// Pool-adjacent-violators over a label sequence already in the desired
/// order. Returns the fitted value per position. Weights are per-position
/// multiplicities; pass empty for all-ones.
std::vector<double> pav_sequence(std::span<const double> labels,
                                 std::span<const double> weights = {});

/// Fits isotonic regression to (score, label) points. Points are stably
/// sorted by score (original index breaks ties) before pooling. Labels must
/// lie in [0, 1]. Throws std::invalid_argument on empty input.
IsotonicFit fit_isotonic(std::span<const std::pair<double, double>> points);

} // namespace uqx
