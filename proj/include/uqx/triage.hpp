#pragma once

#include "uqx/explainer.hpp"
#include "uqx/venn_abers.hpp"

#include <string>
#include <vector>

namespace uqx {

/// Six-way taxonomy of alternative explanations. Factual categories have
/// their whole uncertainty interval on one side of 0.5; potential ones
/// strictly cover 0.5.
enum class Category {
    counter_factual,
    counter_potential,
    semi_factual,
    semi_potential,
    super_factual,
    super_potential,
};

const char* category_name(Category c);

/// An alternative rule annotated with taxonomy category, ensured flag and
/// ranking inputs.
struct TriagedRule {
    FeatureRule rule;
    Category category = Category::semi_factual;
    bool ensured = false;
    double rank = 0.0;
    double p_hat = 0.0;       // probability of the originally predicted class
    double uncertainty = 0.0; // rule.high - rule.low
};

/// Probability of the predicted class: max(p, 1-p). Identical for
/// thresholded regression.
double predicted_class_prob(double p);

/// Assigns the taxonomy category given the rule interval/estimate and the
/// original calibrated estimate. Throws std::domain_error when the original
/// estimate is exactly 0.5 (the taxonomy is undefined there).
Category categorize(double low, double high, double estimate, double original_estimate);
Category categorize(const FeatureRule& rule, double original_estimate);

/// Strictly lower uncertainty than the original prediction.
bool is_ensured(double rule_uncertainty, double original_uncertainty);

/// Ensured ranking metric: (1-|w|)(1-U) + |w| * (+-P̂), sign following w.
/// Weight must lie in [-1, 1].
double rank_score(double p_hat, double uncertainty, double w);

/// Sorts descending by rank under w (ties: lower uncertainty, then stable
/// generation index) and returns the first min(top_k, n) rules with their
/// rank fields filled in.
std::vector<TriagedRule> rank_rules(std::vector<TriagedRule> rules, double w, std::size_t top_k);

enum class FilterKind { counter, semi, super };

std::vector<TriagedRule> filter_category(const std::vector<TriagedRule>& rules, FilterKind kind,
                                         bool include_potential);

std::vector<TriagedRule> filter_ensured(const std::vector<TriagedRule>& rules);

/// Whether a (probability, uncertainty) pair is attainable under the given
/// interval mode: u <= 2*min(p, 1-p) for plain means, and
/// u/(1+u) <= p <= 1/(1+u) for regularised means.
bool feasible(double p, double u, IntervalMode mode);

/// Annotates every rule of a probabilistic alternative explanation.
/// Throws std::invalid_argument for plain interval regression and
/// std::domain_error when the original estimate is exactly 0.5.
std::vector<TriagedRule> triage_explanation(const Explanation& explanation, double w);

} // namespace uqx
