#pragma once

#include <span>
#include <vector>

namespace uqx {

enum class IntervalMode { mean, regularised };

/// Calibrated probability interval for the positive class.
struct ProbabilityInterval {
    double low = 0.0;
    double high = 0.0;
    double estimate = 0.0;
    IntervalMode mode = IntervalMode::regularised;

    double uncertainty() const { return high - low; }
};

/// Log-loss-minimising single estimate for an interval: high / (1 - low + high).
/// The result always lies in [low, high]. Throws if low > high or outside [0, 1].
double regularise(double low, double high);

/// Venn-Abers calibration over (score, binary label) pairs.
///
/// Each query refits two isotonic regressions on the calibration points plus
/// the test score labelled 0 and labelled 1; the fitted values at the test
/// score give the interval bounds. Calibration points are sorted once at
/// construction, so a query costs one ordered insert plus a linear PAV pass.
/// Immutable after construction; concurrent queries are safe.
class VennAbersCalibrator {
public:
    VennAbersCalibrator(std::span<const double> scores, std::span<const int> labels);

    ProbabilityInterval predict(double test_score) const;

    std::size_t size() const { return scores_.size(); }

private:
    std::vector<double> scores_; // sorted ascending, stable in original order
    std::vector<double> labels_; // reordered alongside scores_
};

/// One-shot convenience wrapper around VennAbersCalibrator.
ProbabilityInterval va_predict(std::span<const double> scores, std::span<const int> labels,
                               double test_score);

} // namespace uqx
