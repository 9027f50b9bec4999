#pragma once

#include "uqx/dataset.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace uqx {

struct ForestParams {
    int n_trees = 100;
    std::optional<int> max_depth;
    int min_samples_leaf = 2;
    std::uint64_t rng_seed = 42;
    bool bootstrap = true;
    // Features sampled per split; defaults to sqrt(F) for classification and
    // ceil(F/3) for regression when unset.
    std::optional<int> max_features;
};

/// Anything that can score a feature vector. Classification scores are the
/// positive-class probability estimate in [0, 1]. Immutable once built;
/// concurrent scoring is safe.
class ScoringModel {
public:
    virtual ~ScoringModel() = default;
    virtual double score(std::span<const double> instance) const = 0;
    virtual Task task() const = 0;
    virtual std::size_t n_features() const = 0;
    /// True when the model can score arbitrary perturbed instances.
    virtual bool supports_rescoring() const { return true; }
};

/// Bagged CART forest. Classification trees vote their leaf majority class
/// and the score is the positive vote fraction; regression predicts the mean
/// of the per-tree leaf means. Deterministic for a fixed (data, params, seed).
class RandomForest : public ScoringModel {
public:
    double score(std::span<const double> instance) const override;
    Task task() const override { return task_; }
    std::size_t n_features() const override { return n_features_; }
    int n_trees() const { return static_cast<int>(trees_.size()); }

    struct Node {
        int feature = -1; // -1 for leaves
        double threshold = 0.0;
        bool categorical = false;
        int left = -1;
        int right = -1;
        double value = 0.0;
    };

private:
    friend std::unique_ptr<RandomForest> train_forest(const Dataset&, const ForestParams&);
    std::vector<std::vector<Node>> trees_;
    std::vector<FeatureKind> feature_kinds_;
    Task task_ = Task::classification;
    std::size_t n_features_ = 0;
};

/// Trains a forest on the dataset's task. Classification targets must be
/// binary. Throws std::invalid_argument on empty data or bad targets.
std::unique_ptr<RandomForest> train_forest(const Dataset& training_set, const ForestParams& params);

/// Score table keyed by instance id for externally supplied scores. Cannot
/// rescore perturbed instances.
class ExternalScores : public ScoringModel {
public:
    ExternalScores(std::map<std::int64_t, double> table, Task task);

    double score(std::span<const double> instance) const override;
    double score_for_id(std::int64_t id) const;
    Task task() const override { return task_; }
    std::size_t n_features() const override { return 0; }
    bool supports_rescoring() const override { return false; }

private:
    std::map<std::int64_t, double> table_;
    Task task_;
};

/// Loads `id,score` CSV into an external-scores model. Classification scores
/// are validated to lie in [0, 1]; failures name the offending line.
std::unique_ptr<ExternalScores> load_external_scores(const std::string& path, Task task);

} // namespace uqx
