#include "uqx/triage.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uqx {

const char* category_name(Category c) {
    switch (c) {
        case Category::counter_factual: return "counter_factual";
        case Category::counter_potential: return "counter_potential";
        case Category::semi_factual: return "semi_factual";
        case Category::semi_potential: return "semi_potential";
        case Category::super_factual: return "super_factual";
        case Category::super_potential: return "super_potential";
    }
    return "?";
}

double predicted_class_prob(double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("probability outside [0, 1]");
    return std::max(p, 1.0 - p);
}

Category categorize(double low, double high, double estimate, double original_estimate) {
    if (original_estimate == 0.5)
        throw std::domain_error("undefined taxonomy for an original estimate of exactly 0.5");
    if (low < 0.0 || high > 1.0 || low > high || estimate < low || estimate > high ||
        original_estimate < 0.0 || original_estimate > 1.0)
        throw std::invalid_argument("categorize requires interval values in [0, 1]");

    // An estimate of exactly 0.5 counts as the opposite side: the class is
    // no longer clear, which groups with a changed prediction.
    const bool original_positive = original_estimate > 0.5;
    const bool same_side = estimate != 0.5 && (estimate > 0.5) == original_positive;
    const bool potential = low < 0.5 && 0.5 < high;
    const bool beyond = std::abs(estimate - 0.5) >= std::abs(original_estimate - 0.5);

    if (potential) {
        if (!same_side) return Category::counter_potential;
        return beyond ? Category::super_potential : Category::semi_potential;
    }
    if (!same_side) return Category::counter_factual;
    return beyond ? Category::super_factual : Category::semi_factual;
}

Category categorize(const FeatureRule& rule, double original_estimate) {
    return categorize(rule.low, rule.high, rule.estimate, original_estimate);
}

bool is_ensured(double rule_uncertainty, double original_uncertainty) {
    return rule_uncertainty < original_uncertainty;
}

double rank_score(double p_hat, double uncertainty, double w) {
    if (w < -1.0 || w > 1.0) throw std::invalid_argument("weight must lie in [-1, 1]");
    const double aw = std::abs(w);
    const double directed = w < 0.0 ? -p_hat : p_hat;
    return (1.0 - aw) * (1.0 - uncertainty) + aw * directed;
}

std::vector<TriagedRule> rank_rules(std::vector<TriagedRule> rules, double w, std::size_t top_k) {
    if (top_k < 1) throw std::invalid_argument("top_k must be positive");
    for (TriagedRule& r : rules) r.rank = rank_score(r.p_hat, r.uncertainty, w);
    std::stable_sort(rules.begin(), rules.end(), [](const TriagedRule& a, const TriagedRule& b) {
        if (a.rank != b.rank) return a.rank > b.rank;
        if (a.uncertainty != b.uncertainty) return a.uncertainty < b.uncertainty;
        return a.rule.generation_index < b.rule.generation_index;
    });
    if (rules.size() > top_k) rules.resize(top_k);
    return rules;
}

std::vector<TriagedRule> filter_category(const std::vector<TriagedRule>& rules, FilterKind kind,
                                         bool include_potential) {
    Category factual = Category::counter_factual;
    Category potential = Category::counter_potential;
    switch (kind) {
        case FilterKind::counter: break;
        case FilterKind::semi:
            factual = Category::semi_factual;
            potential = Category::semi_potential;
            break;
        case FilterKind::super:
            factual = Category::super_factual;
            potential = Category::super_potential;
            break;
    }
    std::vector<TriagedRule> out;
    for (const TriagedRule& r : rules)
        if (r.category == factual || (include_potential && r.category == potential))
            out.push_back(r);
    return out;
}

std::vector<TriagedRule> filter_ensured(const std::vector<TriagedRule>& rules) {
    std::vector<TriagedRule> out;
    for (const TriagedRule& r : rules)
        if (r.ensured) out.push_back(r);
    return out;
}

bool feasible(double p, double u, IntervalMode mode) {
    if (p < 0.0 || p > 1.0 || u < 0.0 || u > 1.0) return false;
    if (mode == IntervalMode::mean) return u <= 2.0 * std::min(p, 1.0 - p);
    return u / (1.0 + u) <= p && p <= 1.0 / (1.0 + u);
}

std::vector<TriagedRule> triage_explanation(const Explanation& explanation, double w) {
    if (!explanation.mode.probabilistic())
        throw std::invalid_argument("taxonomy requires a probabilistic mode");
    if (explanation.kind != ExplanationKind::alternative)
        throw std::invalid_argument("triage applies to alternative explanations");

    const bool original_positive = explanation.estimate > 0.5;
    const double original_uncertainty = explanation.uncertainty();

    std::vector<TriagedRule> out;
    out.reserve(explanation.rules.size());
    for (const FeatureRule& rule : explanation.rules) {
        TriagedRule t;
        t.rule = rule;
        t.category = categorize(rule, explanation.estimate);
        t.uncertainty = rule.uncertainty();
        t.ensured = is_ensured(t.uncertainty, original_uncertainty);
        t.p_hat = original_positive ? rule.estimate : 1.0 - rule.estimate;
        t.rank = rank_score(t.p_hat, t.uncertainty, w);
        out.push_back(std::move(t));
    }
    return out;
}

} // namespace uqx
