#include "uqx/venn_abers.hpp"

#include "uqx/isotonic.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace uqx {

double regularise(double low, double high) {
    if (low < 0.0 || high > 1.0 || low > high)
        throw std::invalid_argument("regularise requires 0 <= low <= high <= 1");
    return high / (1.0 - low + high);
}

VennAbersCalibrator::VennAbersCalibrator(std::span<const double> scores,
                                         std::span<const int> labels) {
    if (scores.empty()) throw std::invalid_argument("no calibration points");
    if (scores.size() != labels.size())
        throw std::invalid_argument("scores and labels differ in length");
    for (int y : labels)
        if (y != 0 && y != 1) throw std::invalid_argument("labels must be binary");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    scores_.resize(scores.size());
    labels_.resize(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        scores_[i] = scores[order[i]];
        labels_[i] = static_cast<double>(labels[order[i]]);
    }
}

ProbabilityInterval VennAbersCalibrator::predict(double test_score) const {
    // The hypothetical test point carries the largest original index, so it
    // slots after any calibration points sharing its score.
    const std::size_t pos = static_cast<std::size_t>(
        std::upper_bound(scores_.begin(), scores_.end(), test_score) - scores_.begin());

    std::vector<double> augmented(labels_.size() + 1);
    std::copy(labels_.begin(), labels_.begin() + static_cast<std::ptrdiff_t>(pos), augmented.begin());
    std::copy(labels_.begin() + static_cast<std::ptrdiff_t>(pos), labels_.end(),
              augmented.begin() + static_cast<std::ptrdiff_t>(pos) + 1);

    augmented[pos] = 0.0;
    const double low = pav_sequence(augmented)[pos];
    augmented[pos] = 1.0;
    const double high = pav_sequence(augmented)[pos];

    return ProbabilityInterval{low, high, regularise(low, high), IntervalMode::regularised};
}

ProbabilityInterval va_predict(std::span<const double> scores, std::span<const int> labels,
                               double test_score) {
    return VennAbersCalibrator(scores, labels).predict(test_score);
}

} // namespace uqx
