#include "uqx/triage.hpp"

#include "uqx/rng.hpp"

#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <vector>

using namespace uqx;

namespace {

FeatureRule rule_with(double low, double high, double estimate, int generation = 0) {
    FeatureRule r;
    r.conditions = {Condition{0, Condition::Op::geq, 0.0}};
    r.low = low;
    r.high = high;
    r.estimate = estimate;
    r.generation_index = generation;
    return r;
}

TriagedRule triaged(double p_hat, double uncertainty, int generation = 0) {
    TriagedRule t;
    t.rule = rule_with(0.0, uncertainty, uncertainty / 2.0, generation);
    t.p_hat = p_hat;
    t.uncertainty = uncertainty;
    return t;
}

} // namespace

TEST_CASE("predicted class probability") {
    CHECK(predicted_class_prob(0.3) == 0.7);
    CHECK(predicted_class_prob(0.5) == 0.5);
    CHECK(predicted_class_prob(0.4) == 0.6); // thresholded regression reads P(y<t)=0.4 the same way
    CHECK_THROWS_AS(predicted_class_prob(1.2), std::invalid_argument);
}

TEST_CASE("categorisation around an original estimate of 0.6") {
    CHECK(categorize(0.1, 0.3, 0.2, 0.6) == Category::counter_factual);
    CHECK(categorize(0.4, 0.7, 0.55, 0.6) == Category::semi_potential);
    CHECK(categorize(0.45, 0.95, 0.7, 0.6) == Category::super_potential);
    CHECK(categorize(0.52, 0.58, 0.55, 0.6) == Category::semi_factual);
    CHECK(categorize(0.65, 0.85, 0.75, 0.6) == Category::super_factual);
    CHECK(categorize(0.3, 0.6, 0.45, 0.6) == Category::counter_potential);
}

TEST_CASE("categorisation boundary choices") {
    // Interval touching 0.5 exactly is not potential.
    CHECK(categorize(0.5, 0.8, 0.6, 0.7) == Category::semi_factual);
    CHECK(categorize(0.2, 0.5, 0.3, 0.7) == Category::counter_factual);
    // Estimate equal to the original counts as super.
    CHECK(categorize(0.55, 0.65, 0.6, 0.6) == Category::super_factual);
    CHECK(categorize(0.45, 0.8, 0.6, 0.6) == Category::super_potential);
    // Estimate exactly 0.5 inside a potential interval groups with counter.
    CHECK(categorize(0.3, 0.7, 0.5, 0.6) == Category::counter_potential);
    // Mirrored original below one half.
    CHECK(categorize(0.6, 0.9, 0.8, 0.4) == Category::counter_factual);
    CHECK(categorize(0.1, 0.3, 0.2, 0.4) == Category::super_factual);
    CHECK_THROWS_AS(categorize(0.4, 0.6, 0.5, 0.5), std::domain_error);
    CHECK_THROWS_AS(categorize(0.6, 0.4, 0.5, 0.6), std::invalid_argument);
}

TEST_CASE("ensured comparison is strict") {
    CHECK(is_ensured(0.08, 0.15));
    CHECK_FALSE(is_ensured(0.15, 0.15));
    CHECK_FALSE(is_ensured(0.20, 0.15));
}

TEST_CASE("rank score") {
    CHECK(rank_score(0.3, 0.1, 0.0) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(rank_score(0.99, 0.1, 0.0) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(rank_score(0.8, 0.1, 0.5) == doctest::Approx(0.85).epsilon(1e-12));
    CHECK(rank_score(0.8, 0.4, -1.0) == doctest::Approx(-0.8).epsilon(1e-12));
    CHECK(rank_score(0.8, 0.4, 1.0) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK_THROWS_AS(rank_score(0.5, 0.5, 1.5), std::invalid_argument);
}

TEST_CASE("ranking monotonicity") {
    for (double w : {0.25, 0.75}) {
        CHECK(rank_score(0.9, 0.2, w) > rank_score(0.5, 0.2, w));
        CHECK(rank_score(0.9, 0.2, -w) < rank_score(0.5, 0.2, -w));
        CHECK(rank_score(0.7, 0.1, w) > rank_score(0.7, 0.3, w));
    }
}

TEST_CASE("rank_rules ordering under pure weights") {
    std::vector<TriagedRule> rules = {triaged(0.9, 0.30, 0), triaged(0.2, 0.05, 1),
                                      triaged(0.6, 0.20, 2), triaged(0.4, 0.10, 3)};

    const std::vector<TriagedRule> by_uncertainty = rank_rules(rules, 0.0, 10);
    for (std::size_t i = 1; i < by_uncertainty.size(); ++i)
        CHECK(by_uncertainty[i - 1].uncertainty <= by_uncertainty[i].uncertainty);

    const std::vector<TriagedRule> by_prob = rank_rules(rules, 1.0, 10);
    for (std::size_t i = 1; i < by_prob.size(); ++i)
        CHECK(by_prob[i - 1].p_hat >= by_prob[i].p_hat);

    const std::vector<TriagedRule> by_neg = rank_rules(rules, -1.0, 10);
    for (std::size_t i = 1; i < by_neg.size(); ++i)
        CHECK(by_neg[i - 1].p_hat <= by_neg[i].p_hat);

    CHECK(rank_rules(rules, 0.5, 2).size() == 2);
    CHECK(rank_rules(rules, 0.5, 50).size() == 4);
    CHECK_THROWS_AS(rank_rules(rules, 0.5, 0), std::invalid_argument);
}

TEST_CASE("rank ties fall back to uncertainty then generation order") {
    std::vector<TriagedRule> rules = {triaged(0.8, 0.2, 0), triaged(0.8, 0.2, 1),
                                      triaged(0.8, 0.1, 2)};
    const std::vector<TriagedRule> ranked = rank_rules(rules, 1.0, 10);
    // All share rank = 0.8; the lower-uncertainty rule wins, then stable order.
    CHECK(ranked[0].rule.generation_index == 2);
    CHECK(ranked[1].rule.generation_index == 0);
    CHECK(ranked[2].rule.generation_index == 1);
}

TEST_CASE("rank order equals the stable argsort of its keys") {
    auto eng = rng::make_engine(31, 0);
    std::vector<TriagedRule> rules;
    for (int i = 0; i < 40; ++i) {
        const double u = rng::uniform01(eng);
        rules.push_back(triaged(rng::uniform01(eng), u, i));
    }
    const double w = 0.5;
    std::vector<TriagedRule> expected = rules;
    for (TriagedRule& r : expected) r.rank = rank_score(r.p_hat, r.uncertainty, w);
    std::stable_sort(expected.begin(), expected.end(), [](const TriagedRule& a, const TriagedRule& b) {
        if (a.rank != b.rank) return a.rank > b.rank;
        if (a.uncertainty != b.uncertainty) return a.uncertainty < b.uncertainty;
        return a.rule.generation_index < b.rule.generation_index;
    });
    const std::vector<TriagedRule> ranked = rank_rules(rules, w, rules.size());
    for (std::size_t i = 0; i < ranked.size(); ++i)
        CHECK(ranked[i].rule.generation_index == expected[i].rule.generation_index);
}

TEST_CASE("category filters") {
    std::vector<TriagedRule> rules;
    const std::array<Category, 6> all = {Category::counter_factual, Category::counter_potential,
                                         Category::semi_factual,    Category::semi_potential,
                                         Category::super_factual,   Category::super_potential};
    for (std::size_t i = 0; i < all.size(); ++i) {
        TriagedRule t = triaged(0.5, 0.1, static_cast<int>(i));
        t.category = all[i];
        rules.push_back(t);
    }
    CHECK(filter_category(rules, FilterKind::counter, true).size() == 2);
    CHECK(filter_category(rules, FilterKind::counter, false).size() == 1);
    CHECK(filter_category(rules, FilterKind::semi, true).size() == 2);
    CHECK(filter_category(rules, FilterKind::super, false).size() == 1);
    CHECK(filter_category({}, FilterKind::super, true).empty());
}

TEST_CASE("ensured filter keeps order and is idempotent") {
    std::vector<TriagedRule> rules = {triaged(0.5, 0.05, 0), triaged(0.5, 0.20, 1),
                                      triaged(0.5, 0.10, 2)};
    rules[0].ensured = true;
    rules[2].ensured = true;
    const std::vector<TriagedRule> once = filter_ensured(rules);
    REQUIRE(once.size() == 2);
    CHECK(once[0].rule.generation_index == 0);
    CHECK(once[1].rule.generation_index == 2);
    const std::vector<TriagedRule> twice = filter_ensured(once);
    CHECK(twice.size() == once.size());

    std::vector<TriagedRule> unsured = {triaged(0.5, 0.2, 0)};
    CHECK(filter_ensured(unsured).empty());
}

TEST_CASE("feasible regions") {
    CHECK(feasible(0.25, 0.5, IntervalMode::mean));
    CHECK_FALSE(feasible(0.9, 0.5, IntervalMode::mean));
    CHECK(feasible(0.5, 1.0, IntervalMode::regularised));
    CHECK_FALSE(feasible(0.51, 1.0, IntervalMode::regularised));
    CHECK_FALSE(feasible(1.2, 0.1, IntervalMode::mean));

    // Every regularised interval lands inside the regularised region.
    auto eng = rng::make_engine(37, 0);
    for (int i = 0; i < 1000; ++i) {
        const double a = rng::uniform01(eng);
        const double b = rng::uniform01(eng);
        const double low = std::min(a, b);
        const double high = std::max(a, b);
        CHECK(feasible(regularise(low, high), high - low, IntervalMode::regularised));
        CHECK(feasible((low + high) / 2.0, high - low, IntervalMode::mean));
    }
}

TEST_CASE("taxonomy partition is total and single-valued") {
    auto eng = rng::make_engine(41, 0);
    std::map<Category, int> counts;
    const int n = 2000;
    for (int i = 0; i < n; ++i) {
        const double a = rng::uniform01(eng);
        const double b = rng::uniform01(eng);
        const double low = std::min(a, b);
        const double high = std::max(a, b);
        const double estimate = i % 2 == 0 ? regularise(low, high) : (low + high) / 2.0;
        double original = rng::uniform01(eng);
        if (original == 0.5) original = 0.25;
        const Category c = categorize(low, high, estimate, original);
        counts[c] += 1;
        const bool potential = low < 0.5 && 0.5 < high;
        const bool is_potential_category = c == Category::counter_potential ||
                                           c == Category::semi_potential ||
                                           c == Category::super_potential;
        CHECK(potential == is_potential_category);
    }
    int total = 0;
    for (const auto& [c, k] : counts) total += k;
    CHECK(total == n);
}

TEST_CASE("no super-potential above the feasibility bound") {
    auto eng = rng::make_engine(43, 0);
    for (int i = 0; i < 20000; ++i) {
        const double a = rng::uniform01(eng);
        const double b = rng::uniform01(eng);
        const double low = std::min(a, b);
        const double high = std::max(a, b);

        const double mean_est = (low + high) / 2.0;
        double original = rng::uniform(eng, 0.75, 1.0);
        if (rng::bernoulli(eng, 0.5)) original = 1.0 - original;
        if (predicted_class_prob(original) >= 0.75 && original != 0.5)
            CHECK(categorize(low, high, mean_est, original) != Category::super_potential);

        const double reg_est = regularise(low, high);
        double reg_original = rng::uniform(eng, 2.0 / 3.0 + 1e-9, 1.0);
        if (rng::bernoulli(eng, 0.5)) reg_original = 1.0 - reg_original;
        CHECK(categorize(low, high, reg_est, reg_original) != Category::super_potential);
    }
}

TEST_CASE("triage driver annotates relative to the predicted class") {
    Explanation expl;
    expl.mode = ExplanationMode::classification();
    expl.estimate = 0.4; // negative class predicted
    expl.low = 0.3;
    expl.high = 0.55;
    expl.kind = ExplanationKind::alternative;
    expl.rules = {rule_with(0.1, 0.2, 0.15, 0), rule_with(0.6, 0.9, 0.8, 1)};

    const std::vector<TriagedRule> rules = triage_explanation(expl, 0.5);
    REQUIRE(rules.size() == 2);
    CHECK(rules[0].p_hat == doctest::Approx(0.85)); // P of the predicted (negative) class
    CHECK(rules[1].p_hat == doctest::Approx(0.2));
    CHECK(rules[0].category == Category::super_factual);
    CHECK(rules[1].category == Category::counter_factual);
    CHECK(rules[0].ensured); // width 0.1 < 0.25
    CHECK_FALSE(rules[1].ensured); // width 0.3 > 0.25

    Explanation interval = expl;
    interval.mode = ExplanationMode::regression_interval(0.1);
    CHECK_THROWS_AS(triage_explanation(interval, 0.5), std::invalid_argument);

    Explanation factual = expl;
    factual.kind = ExplanationKind::factual;
    CHECK_THROWS_AS(triage_explanation(factual, 0.5), std::invalid_argument);
}
