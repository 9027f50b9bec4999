#pragma once

#include "uqx/cpd.hpp"
#include "uqx/dataset.hpp"
#include "uqx/model.hpp"
#include "uqx/venn_abers.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace uqx {

enum class ModeKind { classification, regression_interval, regression_threshold };

/// What a calibrated prediction explains: a class probability, a regression
/// value with a coverage interval at significance epsilon, or the
/// probability of the target lying at or below a threshold.
struct ExplanationMode {
    ModeKind kind = ModeKind::classification;
    double epsilon = 0.1;
    double threshold = 0.0;

    /// Probabilistic modes put estimates on the [0,1] probability scale and
    /// support the taxonomy; plain interval regression does not.
    bool probabilistic() const { return kind != ModeKind::regression_interval; }

    static ExplanationMode classification() { return {ModeKind::classification, 0.0, 0.0}; }
    static ExplanationMode regression_interval(double epsilon) {
        return {ModeKind::regression_interval, epsilon, 0.0};
    }
    static ExplanationMode regression_threshold(double threshold) {
        return {ModeKind::regression_threshold, 0.0, threshold};
    }
};

struct CalibratedPrediction {
    double estimate = 0.0;
    double low = 0.0;
    double high = 0.0;
    double raw_score = 0.0;

    double uncertainty() const { return high - low; }
};

/// Turns raw model scores into calibrated estimates with uncertainty
/// intervals: Venn-Abers for classification, a conformal predictive system
/// for regression, and the CPD-percentile-into-Venn-Abers composition for
/// thresholded regression. Immutable after construction.
class Calibrator {
public:
    static Calibrator classification(std::vector<double> cal_scores, std::vector<int> cal_labels);
    static Calibrator regression_interval(std::vector<double> residuals, double epsilon,
                                          TiePolicy tie = TiePolicy::fixed_half,
                                          std::uint64_t seed = 0);
    static Calibrator regression_threshold(std::vector<double> cal_predictions,
                                           std::vector<double> cal_targets, double threshold,
                                           TiePolicy tie = TiePolicy::fixed_half,
                                           std::uint64_t seed = 0);

    /// Scores the calibration split with the model and dispatches on mode.
    static Calibrator from_model(const ScoringModel& model, const Dataset& calibration,
                                 const ExplanationMode& mode, TiePolicy tie = TiePolicy::fixed_half,
                                 std::uint64_t seed = 0);

    CalibratedPrediction predict(double raw_score) const;

    const ExplanationMode& mode() const { return mode_; }
    std::size_t size() const;

private:
    Calibrator() = default;

    ExplanationMode mode_;
    std::optional<VennAbersCalibrator> va_;  // classification and threshold modes
    std::vector<double> sorted_residuals_;   // regression modes
    std::size_t interval_low_index_ = 0;     // precomputed two-sided indices (1-based)
    std::size_t interval_high_index_ = 0;
    std::size_t median_up_index_ = 0;
    std::size_t median_down_index_ = 0;
    TiePolicy tie_ = TiePolicy::fixed_half;
    std::uint64_t seed_ = 0;
};

struct Condition {
    enum class Op { equals, less_than, geq };
    int feature = 0;
    Op op = Op::equals;
    double value = 0.0;

    /// True when `v` satisfies the condition.
    bool covers(double v) const {
        switch (op) {
            case Op::equals: return v == value;
            case Op::less_than: return v < value;
            case Op::geq: return v >= value;
        }
        return false;
    }
};

/// One factual or alternative condition with its calibrated outcome. For
/// alternative rules estimate/low/high are the calibrated prediction under
/// the condition; for factual rules they hold the feature weight and its
/// interval.
struct FeatureRule {
    std::vector<Condition> conditions; // one entry, or two for conjunctions
    double estimate = 0.0;
    double low = 0.0;
    double high = 0.0;
    bool is_conjunctive = false;
    int generation_index = 0;

    double uncertainty() const { return high - low; }
};

enum class ExplanationKind { factual, alternative };

struct Explanation {
    std::vector<double> instance;
    ExplanationMode mode;
    double estimate = 0.0;
    double low = 0.0;
    double high = 0.0;
    std::vector<FeatureRule> rules;
    ExplanationKind kind = ExplanationKind::alternative;

    double uncertainty() const { return high - low; }
};

/// Decile boundaries (10th..90th percentile, linearly interpolated,
/// deduplicated) of a sample.
std::vector<double> decile_boundaries(std::span<const double> values);

/// At most two alternative conditions for a numeric feature: less_than the
/// largest boundary strictly below the instance value and geq the smallest
/// boundary strictly above it. A constant feature yields none.
std::vector<Condition> discretize_feature(std::span<const double> cal_values,
                                          double instance_value, int feature);

struct ExplainerOptions {
    TiePolicy tie = TiePolicy::fixed_half;
    std::uint64_t seed = 0;
    /// Largest number of substitution values per side when building
    /// conjunction grids; larger sets collapse to weighted-quantile
    /// representatives.
    int conjunction_value_cap = 16;
};

/// Generates factual and alternative explanations by systematic
/// single-feature perturbation against calibration data. Holds its own copy
/// of the calibration summaries; the model must outlive the explainer.
/// Instances may be explained concurrently.
class Explainer {
public:
    Explainer(const ScoringModel& model, const Dataset& calibration, ExplanationMode mode,
              ExplainerOptions options = {});

    CalibratedPrediction calibrated_predict(std::span<const double> instance) const;
    Explanation explain_alternatives(std::span<const double> instance) const;
    Explanation explain_factual(std::span<const double> instance) const;

    /// Appends pairwise conjunction rules for every pair of single-feature
    /// rules on distinct features. Only order 2 is supported.
    Explanation add_conjunctions(Explanation explanation, int max_order = 2) const;

    const Calibrator& calibrator() const { return calibrator_; }
    std::size_t n_features() const { return feature_kinds_.size(); }

private:
    struct WeightedValue {
        double value;
        double weight;
    };

    struct RuleAccumulator;

    std::vector<WeightedValue> values_satisfying(int feature, const Condition& condition) const;
    std::vector<WeightedValue> capped(std::vector<WeightedValue> values) const;

    const ScoringModel* model_;
    Calibrator calibrator_;
    std::vector<FeatureKind> feature_kinds_;
    std::vector<std::size_t> alphabet_sizes_;
    std::vector<std::vector<WeightedValue>> distinct_values_; // per feature, sorted
    std::vector<std::vector<double>> boundaries_;             // per numeric feature
    ExplainerOptions options_;
};

} // namespace uqx
