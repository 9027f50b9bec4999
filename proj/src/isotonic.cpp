#include "uqx/isotonic.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace uqx {

IsotonicFit::IsotonicFit(std::vector<std::pair<double, double>> breakpoints)
    : breakpoints_(std::move(breakpoints)) {
    if (breakpoints_.empty()) throw std::invalid_argument("no calibration points");
}

double IsotonicFit::operator()(double score) const {
    // Last breakpoint with score <= s; below the first block, clamp to it.
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), score,
                               [](double s, const std::pair<double, double>& bp) { return s < bp.first; });
    if (it == breakpoints_.begin()) return breakpoints_.front().second;
    return std::prev(it)->second;
}

std::vector<double> pav_sequence(std::span<const double> labels, std::span<const double> weights) {
    const std::size_t n = labels.size();
    std::vector<double> fitted(n);
    if (n == 0) return fitted;

    // Blocks as (weighted sum, weight, first index); merge while the mean
    // drops below the previous block's mean.
    struct Block {
        double sum;
        double weight;
        std::size_t start;
    };
    std::vector<Block> blocks;
    blocks.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        blocks.push_back({labels[i] * w, w, i});
        while (blocks.size() > 1) {
            const Block& b = blocks.back();
            const Block& a = blocks[blocks.size() - 2];
            if (a.sum * b.weight <= b.sum * a.weight) break;
            Block merged{a.sum + b.sum, a.weight + b.weight, a.start};
            blocks.pop_back();
            blocks.back() = merged;
        }
    }

    std::size_t pos = n;
    for (std::size_t bi = blocks.size(); bi-- > 0;) {
        const double value = blocks[bi].sum / blocks[bi].weight;
        for (std::size_t i = blocks[bi].start; i < pos; ++i) fitted[i] = value;
        pos = blocks[bi].start;
    }
    return fitted;
}

IsotonicFit fit_isotonic(std::span<const std::pair<double, double>> points) {
    if (points.empty()) throw std::invalid_argument("no calibration points");
    for (const auto& [score, label] : points) {
        if (label < 0.0 || label > 1.0) throw std::invalid_argument("labels must lie in [0, 1]");
        (void)score;
    }

    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return points[a].first < points[b].first; });

    std::vector<double> labels(points.size());
    for (std::size_t i = 0; i < order.size(); ++i) labels[i] = points[order[i]].second;
    const std::vector<double> fitted = pav_sequence(labels);

    std::vector<std::pair<double, double>> breakpoints;
    breakpoints.reserve(points.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        const double score = points[order[i]].first;
        if (!breakpoints.empty() && breakpoints.back().first == score) {
            breakpoints.back().second = fitted[i];
        } else {
            breakpoints.emplace_back(score, fitted[i]);
        }
    }
    return IsotonicFit(std::move(breakpoints));
}

} // namespace uqx
