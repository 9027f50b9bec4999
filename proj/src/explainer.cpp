#include "uqx/explainer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace uqx {

namespace {

std::vector<Condition> conditions_from_boundaries(const std::vector<double>& boundaries,
                                                  double instance_value, int feature) {
    std::vector<Condition> out;
    double below = 0.0, above = 0.0;
    bool has_below = false, has_above = false;
    for (double b : boundaries) {
        if (b < instance_value) {
            below = b;
            has_below = true;
        } else if (b > instance_value && !has_above) {
            above = b;
            has_above = true;
        }
    }
    if (has_below) out.push_back({feature, Condition::Op::less_than, below});
    if (has_above) out.push_back({feature, Condition::Op::geq, above});
    return out;
}

} // namespace

Calibrator Calibrator::classification(std::vector<double> cal_scores, std::vector<int> cal_labels) {
    Calibrator c;
    c.mode_ = ExplanationMode::classification();
    c.va_.emplace(cal_scores, cal_labels);
    return c;
}

Calibrator Calibrator::regression_interval(std::vector<double> residuals, double epsilon,
                                           TiePolicy tie, std::uint64_t seed) {
    if (residuals.empty()) throw std::invalid_argument("no calibration residuals");
    if (epsilon <= 0.0 || epsilon >= 1.0) throw std::invalid_argument("epsilon must lie in (0, 1)");
    Calibrator c;
    c.mode_ = ExplanationMode::regression_interval(epsilon);
    c.tie_ = tie;
    c.seed_ = seed;
    c.sorted_residuals_ = std::move(residuals);
    std::sort(c.sorted_residuals_.begin(), c.sorted_residuals_.end());

    const double q1 = static_cast<double>(c.sorted_residuals_.size()) + 1.0;
    const auto lo = static_cast<long>(std::floor(epsilon / 2.0 * q1));
    const auto hi = static_cast<long>(std::ceil((1.0 - epsilon / 2.0) * q1));
    if (lo < 1 || hi > static_cast<long>(c.sorted_residuals_.size()))
        throw std::invalid_argument("insufficient calibration data for epsilon");
    c.interval_low_index_ = static_cast<std::size_t>(lo);
    c.interval_high_index_ = static_cast<std::size_t>(hi);
    c.median_up_index_ = static_cast<std::size_t>(std::ceil(0.5 * q1));
    c.median_down_index_ = static_cast<std::size_t>(std::floor(0.5 * q1));
    return c;
}

Calibrator Calibrator::regression_threshold(std::vector<double> cal_predictions,
                                            std::vector<double> cal_targets, double threshold,
                                            TiePolicy tie, std::uint64_t seed) {
    if (cal_predictions.size() != cal_targets.size())
        throw std::invalid_argument("predictions and targets differ in length");
    if (cal_predictions.empty()) throw std::invalid_argument("no calibration residuals");
    Calibrator c;
    c.mode_ = ExplanationMode::regression_threshold(threshold);
    c.tie_ = tie;
    c.seed_ = seed;
    c.sorted_residuals_.resize(cal_predictions.size());
    for (std::size_t i = 0; i < cal_predictions.size(); ++i)
        c.sorted_residuals_[i] = cal_targets[i] - cal_predictions[i];
    std::sort(c.sorted_residuals_.begin(), c.sorted_residuals_.end());

    // Each calibration instance is scored by its own CPD percentile of the
    // threshold and labelled by whether its target lies at or below it.
    std::vector<double> scores(cal_predictions.size());
    std::vector<int> labels(cal_predictions.size());
    for (std::size_t i = 0; i < cal_predictions.size(); ++i) {
        const double y = threshold - cal_predictions[i];
        scores[i] = detail::cpd_evaluate_sorted(c.sorted_residuals_, y,
                                                detail::cpd_tie_value(tie, seed, y));
        labels[i] = cal_targets[i] <= threshold ? 1 : 0;
    }
    c.va_.emplace(scores, labels);
    return c;
}

Calibrator Calibrator::from_model(const ScoringModel& model, const Dataset& calibration,
                                  const ExplanationMode& mode, TiePolicy tie, std::uint64_t seed) {
    if (calibration.n_rows() == 0) throw std::invalid_argument("no calibration points");
    const bool cls_mode = mode.kind == ModeKind::classification;
    if (cls_mode != (calibration.task == Task::classification))
        throw std::invalid_argument("mode does not match calibration task");

    std::vector<double> predictions(calibration.n_rows());
    for (std::size_t i = 0; i < calibration.n_rows(); ++i)
        predictions[i] = model.score(calibration.rows[i]);

    switch (mode.kind) {
        case ModeKind::classification: {
            std::vector<int> labels(calibration.n_rows());
            for (std::size_t i = 0; i < labels.size(); ++i)
                labels[i] = calibration.target[i] != 0.0 ? 1 : 0;
            return classification(std::move(predictions), std::move(labels));
        }
        case ModeKind::regression_interval: {
            std::vector<double> residuals(calibration.n_rows());
            for (std::size_t i = 0; i < residuals.size(); ++i)
                residuals[i] = calibration.target[i] - predictions[i];
            return regression_interval(std::move(residuals), mode.epsilon, tie, seed);
        }
        case ModeKind::regression_threshold:
            return regression_threshold(std::move(predictions), calibration.target, mode.threshold,
                                        tie, seed);
    }
    throw std::logic_error("unreachable");
}

CalibratedPrediction Calibrator::predict(double raw_score) const {
    switch (mode_.kind) {
        case ModeKind::classification: {
            const ProbabilityInterval p = va_->predict(raw_score);
            return {p.estimate, p.low, p.high, raw_score};
        }
        case ModeKind::regression_interval: {
            const double low = raw_score + sorted_residuals_[interval_low_index_ - 1];
            const double high = raw_score + sorted_residuals_[interval_high_index_ - 1];
            const double median = raw_score + (sorted_residuals_[median_up_index_ - 1] +
                                               sorted_residuals_[median_down_index_ - 1]) /
                                                  2.0;
            return {median, low, high, raw_score};
        }
        case ModeKind::regression_threshold: {
            const double y = mode_.threshold - raw_score;
            const double percentile = detail::cpd_evaluate_sorted(
                sorted_residuals_, y, detail::cpd_tie_value(tie_, seed_, y));
            const ProbabilityInterval p = va_->predict(percentile);
            return {p.estimate, p.low, p.high, raw_score};
        }
    }
    throw std::logic_error("unreachable");
}

std::size_t Calibrator::size() const {
    return va_ ? va_->size() : sorted_residuals_.size();
}

std::vector<double> decile_boundaries(std::span<const double> values) {
    if (values.empty()) return {};
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> out;
    out.reserve(9);
    const std::size_t n = sorted.size();
    for (int k = 1; k <= 9; ++k) {
        const double pos = static_cast<double>(k) / 10.0 * static_cast<double>(n - 1);
        const std::size_t i = static_cast<std::size_t>(std::floor(pos));
        const double frac = pos - static_cast<double>(i);
        const double b =
            i + 1 < n ? sorted[i] + frac * (sorted[i + 1] - sorted[i]) : sorted[n - 1];
        if (out.empty() || out.back() != b) out.push_back(b);
    }
    return out;
}

std::vector<Condition> discretize_feature(std::span<const double> cal_values,
                                          double instance_value, int feature) {
    if (cal_values.empty()) throw std::invalid_argument("no calibration values");
    return conditions_from_boundaries(decile_boundaries(cal_values), instance_value, feature);
}

struct Explainer::RuleAccumulator {
    double weight_sum = 0.0;
    double low_sum = 0.0;
    double high_sum = 0.0;
    double estimate_sum = 0.0;

    void add(const CalibratedPrediction& p, double w) {
        weight_sum += w;
        low_sum += w * p.low;
        high_sum += w * p.high;
        estimate_sum += w * p.estimate;
    }

    // Probabilistic rules take the regularised mean of the averaged bounds,
    // which keeps every rule inside the regularised feasible region; plain
    // regression keeps the averaged point estimate.
    void finalize(bool probabilistic, double& estimate, double& low, double& high) const {
        low = low_sum / weight_sum;
        high = high_sum / weight_sum;
        estimate = probabilistic ? regularise(low, high) : estimate_sum / weight_sum;
    }
};

namespace {

const ScoringModel& validated_for_explaining(const ScoringModel& model, const Dataset& calibration) {
    if (!model.supports_rescoring()) throw std::runtime_error("alternatives require rescoring");
    if (model.n_features() != calibration.n_features())
        throw std::invalid_argument("model and calibration data disagree on feature arity");
    return model;
}

} // namespace

Explainer::Explainer(const ScoringModel& model, const Dataset& calibration, ExplanationMode mode,
                     ExplainerOptions options)
    : model_(&validated_for_explaining(model, calibration)),
      calibrator_(Calibrator::from_model(model, calibration, mode, options.tie, options.seed)),
      options_(options) {
    feature_kinds_ = calibration.feature_kinds;
    alphabet_sizes_.resize(calibration.n_features());
    distinct_values_.resize(calibration.n_features());
    boundaries_.resize(calibration.n_features());
    for (std::size_t f = 0; f < calibration.n_features(); ++f) {
        alphabet_sizes_[f] = calibration.alphabets[f].size();
        std::vector<double> column = calibration.column(f);
        std::vector<double> sorted = column;
        std::sort(sorted.begin(), sorted.end());
        auto& distinct = distinct_values_[f];
        for (double v : sorted) {
            if (distinct.empty() || distinct.back().value != v)
                distinct.push_back({v, 1.0});
            else
                distinct.back().weight += 1.0;
        }
        if (feature_kinds_[f] == FeatureKind::numeric) boundaries_[f] = decile_boundaries(column);
    }
}

CalibratedPrediction Explainer::calibrated_predict(std::span<const double> instance) const {
    return calibrator_.predict(model_->score(instance));
}

std::vector<Explainer::WeightedValue> Explainer::values_satisfying(int feature,
                                                                   const Condition& condition) const {
    std::vector<WeightedValue> out;
    for (const WeightedValue& wv : distinct_values_[static_cast<std::size_t>(feature)])
        if (condition.covers(wv.value)) out.push_back(wv);
    return out;
}

std::vector<Explainer::WeightedValue> Explainer::capped(std::vector<WeightedValue> values) const {
    const std::size_t cap = static_cast<std::size_t>(std::max(1, options_.conjunction_value_cap));
    if (values.size() <= cap) return values;

    double total = 0.0;
    for (const WeightedValue& wv : values) total += wv.weight;
    const double per_bucket = total / static_cast<double>(cap);

    // Group by cumulative weight, then represent each group by its weighted
    // median so substitution values stay actual observed values.
    std::vector<WeightedValue> out;
    std::size_t i = 0;
    double consumed = 0.0;
    for (std::size_t b = 0; b < cap && i < values.size(); ++b) {
        const double edge = b + 1 == cap ? total : per_bucket * static_cast<double>(b + 1);
        std::size_t start = i;
        double bucket_weight = 0.0;
        while (i < values.size() && (consumed < edge || i == start)) {
            bucket_weight += values[i].weight;
            consumed += values[i].weight;
            ++i;
        }
        double half = bucket_weight / 2.0;
        double acc = 0.0;
        double median = values[start].value;
        for (std::size_t j = start; j < i; ++j) {
            acc += values[j].weight;
            if (acc >= half) {
                median = values[j].value;
                break;
            }
        }
        out.push_back({median, bucket_weight});
    }
    return out;
}

Explanation Explainer::explain_alternatives(std::span<const double> instance) const {
    if (instance.size() != n_features())
        throw std::invalid_argument("instance arity does not match calibration data");
    const CalibratedPrediction original = calibrated_predict(instance);

    std::unordered_map<double, CalibratedPrediction> cache;
    std::vector<double> probe(instance.begin(), instance.end());
    auto evaluate = [&]() {
        const double raw = model_->score(probe);
        auto it = cache.find(raw);
        if (it == cache.end()) it = cache.emplace(raw, calibrator_.predict(raw)).first;
        return it->second;
    };

    Explanation out;
    out.instance.assign(instance.begin(), instance.end());
    out.mode = calibrator_.mode();
    out.estimate = original.estimate;
    out.low = original.low;
    out.high = original.high;
    out.kind = ExplanationKind::alternative;

    int generation = 0;
    const bool probabilistic = out.mode.probabilistic();
    for (std::size_t f = 0; f < n_features(); ++f) {
        const double actual = instance[f];
        if (feature_kinds_[f] == FeatureKind::categorical) {
            for (std::size_t c = 0; c < alphabet_sizes_[f]; ++c) {
                const double code = static_cast<double>(c);
                if (code == actual) continue;
                probe[f] = code;
                const CalibratedPrediction p = evaluate();
                out.rules.push_back({{Condition{static_cast<int>(f), Condition::Op::equals, code}},
                                     p.estimate,
                                     p.low,
                                     p.high,
                                     false,
                                     generation++});
            }
            probe[f] = actual;
        } else {
            for (const Condition& cond :
                 conditions_from_boundaries(boundaries_[f], actual, static_cast<int>(f))) {
                const std::vector<WeightedValue> values = values_satisfying(static_cast<int>(f), cond);
                if (values.empty()) continue;
                RuleAccumulator acc;
                for (const WeightedValue& wv : values) {
                    probe[f] = wv.value;
                    acc.add(evaluate(), wv.weight);
                }
                probe[f] = actual;
                FeatureRule rule;
                rule.conditions = {cond};
                acc.finalize(probabilistic, rule.estimate, rule.low, rule.high);
                rule.generation_index = generation++;
                out.rules.push_back(std::move(rule));
            }
        }
    }
    return out;
}

Explanation Explainer::explain_factual(std::span<const double> instance) const {
    if (instance.size() != n_features())
        throw std::invalid_argument("instance arity does not match calibration data");
    const CalibratedPrediction original = calibrated_predict(instance);

    std::unordered_map<double, CalibratedPrediction> cache;
    std::vector<double> probe(instance.begin(), instance.end());
    auto evaluate = [&]() {
        const double raw = model_->score(probe);
        auto it = cache.find(raw);
        if (it == cache.end()) it = cache.emplace(raw, calibrator_.predict(raw)).first;
        return it->second;
    };

    Explanation out;
    out.instance.assign(instance.begin(), instance.end());
    out.mode = calibrator_.mode();
    out.estimate = original.estimate;
    out.low = original.low;
    out.high = original.high;
    out.kind = ExplanationKind::factual;

    int generation = 0;
    for (std::size_t f = 0; f < n_features(); ++f) {
        const double actual = instance[f];
        RuleAccumulator acc;
        for (const WeightedValue& wv : distinct_values_[f]) {
            if (wv.value == actual) continue;
            probe[f] = wv.value;
            acc.add(evaluate(), wv.weight);
        }
        probe[f] = actual;
        if (acc.weight_sum == 0.0) continue;

        // Feature weight: original estimate minus the averaged calibrated
        // prediction over all perturbed copies; the interval is the same
        // difference against the averaged bounds.
        const double mean_estimate = acc.estimate_sum / acc.weight_sum;
        const double mean_low = acc.low_sum / acc.weight_sum;
        const double mean_high = acc.high_sum / acc.weight_sum;
        FeatureRule rule;
        rule.conditions = {Condition{static_cast<int>(f), Condition::Op::equals, actual}};
        rule.estimate = original.estimate - mean_estimate;
        rule.low = original.estimate - mean_high;
        rule.high = original.estimate - mean_low;
        rule.generation_index = generation++;
        out.rules.push_back(std::move(rule));
    }
    return out;
}

Explanation Explainer::add_conjunctions(Explanation explanation, int max_order) const {
    if (explanation.kind != ExplanationKind::alternative)
        throw std::invalid_argument("conjunctions require an alternative explanation");
    if (max_order > 2) throw std::invalid_argument("unsupported conjunction order");
    if (max_order < 2) return explanation;
    if (explanation.instance.size() != n_features())
        throw std::invalid_argument("instance arity does not match calibration data");

    std::unordered_map<double, CalibratedPrediction> cache;
    std::vector<double> probe = explanation.instance;
    auto evaluate = [&]() {
        const double raw = model_->score(probe);
        auto it = cache.find(raw);
        if (it == cache.end()) it = cache.emplace(raw, calibrator_.predict(raw)).first;
        return it->second;
    };

    auto substitutions = [&](const Condition& cond) -> std::vector<WeightedValue> {
        if (cond.op == Condition::Op::equals) return {{cond.value, 1.0}};
        return capped(values_satisfying(cond.feature, cond));
    };

    const bool probabilistic = explanation.mode.probabilistic();
    const std::size_t n_single = explanation.rules.size();
    int generation = static_cast<int>(n_single);
    for (std::size_t a = 0; a < n_single; ++a) {
        if (explanation.rules[a].is_conjunctive) continue;
        for (std::size_t b = a + 1; b < n_single; ++b) {
            if (explanation.rules[b].is_conjunctive) continue;
            const Condition& ca = explanation.rules[a].conditions[0];
            const Condition& cb = explanation.rules[b].conditions[0];
            if (ca.feature == cb.feature) continue;

            const std::vector<WeightedValue> va = substitutions(ca);
            const std::vector<WeightedValue> vb = substitutions(cb);
            if (va.empty() || vb.empty()) continue;

            RuleAccumulator acc;
            for (const WeightedValue& wa : va) {
                probe[static_cast<std::size_t>(ca.feature)] = wa.value;
                for (const WeightedValue& wb : vb) {
                    probe[static_cast<std::size_t>(cb.feature)] = wb.value;
                    acc.add(evaluate(), wa.weight * wb.weight);
                }
                probe[static_cast<std::size_t>(cb.feature)] =
                    explanation.instance[static_cast<std::size_t>(cb.feature)];
            }
            probe[static_cast<std::size_t>(ca.feature)] =
                explanation.instance[static_cast<std::size_t>(ca.feature)];

            FeatureRule rule;
            rule.conditions = {ca, cb};
            rule.is_conjunctive = true;
            acc.finalize(probabilistic, rule.estimate, rule.low, rule.high);
            rule.generation_index = generation++;
            explanation.rules.push_back(std::move(rule));
        }
    }
    return explanation;
}

} // namespace uqx
