#include "uqx/model.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

using namespace uqx;

namespace {

Dataset numeric_dataset(std::vector<std::vector<double>> rows, std::vector<double> target,
                        Task task) {
    Dataset d;
    d.task = task;
    d.rows = std::move(rows);
    d.target = std::move(target);
    const std::size_t f = d.rows.front().size();
    for (std::size_t i = 0; i < f; ++i) {
        d.feature_names.push_back("x" + std::to_string(i));
        d.feature_kinds.push_back(FeatureKind::numeric);
        d.alphabets.push_back({});
    }
    return d;
}

struct TempFile {
    std::filesystem::path path;
    explicit TempFile(const std::string& name, const std::string& content) {
        path = std::filesystem::temp_directory_path() / name;
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::filesystem::remove(path); }
};

} // namespace

TEST_CASE("single stump separates 1-d data perfectly") {
    const Dataset d = numeric_dataset({{0.0}, {1.0}, {2.0}, {3.0}}, {0, 0, 1, 1},
                                      Task::classification);
    ForestParams params;
    params.n_trees = 1;
    params.bootstrap = false;
    params.max_depth = 1;
    params.min_samples_leaf = 1;
    const auto forest = train_forest(d, params);
    for (std::size_t i = 0; i < d.n_rows(); ++i) CHECK(forest->score(d.rows[i]) == d.target[i]);
}

TEST_CASE("forest with one tree matches the hand-built cart tree") {
    // x0 separates the labels perfectly at 3.5 with a full gini gain of 3;
    // the best x1 split only reaches 1.5, so the root must split on x0.
    const Dataset d = numeric_dataset(
        {{1, 5}, {2, 4}, {3, 3}, {4, 6}, {5, 1}, {6, 2}}, {0, 0, 0, 1, 1, 1},
        Task::classification);
    ForestParams params;
    params.n_trees = 1;
    params.bootstrap = false;
    params.max_features = 2;
    params.min_samples_leaf = 1;
    const auto forest = train_forest(d, params);
    const std::vector<double> probe_low = {3.4, 0.0};
    const std::vector<double> probe_high = {3.6, 0.0};
    CHECK(forest->score(probe_low) == 0.0);
    CHECK(forest->score(probe_high) == 1.0);
    for (std::size_t i = 0; i < d.n_rows(); ++i) CHECK(forest->score(d.rows[i]) == d.target[i]);
}

TEST_CASE("classification scores are vote fractions in [0,1]") {
    const Dataset d = numeric_dataset(
        {
            {0.1, 0.4}, {0.3, 0.1}, {0.2, 0.9}, {0.8, 0.5}, {0.9, 0.2},
            {0.7, 0.7}, {0.4, 0.3}, {0.6, 0.8}, {0.5, 0.5}, {0.25, 0.6},
        },
        {0, 0, 1, 1, 1, 1, 0, 1, 0, 0}, Task::classification);
    ForestParams params;
    params.n_trees = 8;
    params.rng_seed = 3;
    params.min_samples_leaf = 1;
    const auto forest = train_forest(d, params);
    const std::vector<double> probe = {0.45, 0.5};
    const double s = forest->score(probe);
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
    // Votes are 0/1 per tree, so the score is a multiple of 1/8.
    CHECK(s * 8.0 == doctest::Approx(std::round(s * 8.0)).epsilon(1e-12));
}

TEST_CASE("identical seed and data give identical scores") {
    const Dataset d = synth_classification(200, 17);
    ForestParams params;
    params.n_trees = 12;
    params.rng_seed = 5;
    const auto a = train_forest(d, params);
    const auto b = train_forest(d, params);
    const Dataset probes = synth_classification(20, 18);
    for (const auto& row : probes.rows) CHECK(a->score(row) == b->score(row));
}

TEST_CASE("constant regression target predicts the constant") {
    const Dataset d = numeric_dataset({{0.0}, {0.5}, {1.0}, {2.0}}, {7.5, 7.5, 7.5, 7.5},
                                      Task::regression);
    ForestParams params;
    params.n_trees = 5;
    const auto forest = train_forest(d, params);
    const std::vector<double> probe = {0.3};
    CHECK(forest->score(probe) == 7.5);
}

TEST_CASE("training rejects bad input") {
    const Dataset bad = numeric_dataset({{0.0}, {1.0}}, {0.0, 2.0}, Task::classification);
    CHECK_THROWS_AS(train_forest(bad, {}), std::invalid_argument);
    Dataset empty;
    empty.task = Task::classification;
    CHECK_THROWS_AS(train_forest(empty, {}), std::invalid_argument);
}

TEST_CASE("scoring rejects arity mismatches") {
    const Dataset d = numeric_dataset({{0.0, 1.0}, {1.0, 0.0}}, {0, 1}, Task::classification);
    ForestParams params;
    params.n_trees = 1;
    params.min_samples_leaf = 1;
    const auto forest = train_forest(d, params);
    const std::vector<double> probe = {0.5};
    CHECK_THROWS_AS(forest->score(probe), std::invalid_argument);
}

TEST_CASE("external scores answer by id and reject misses") {
    TempFile file("uqx_scores.csv", "id,score\n0,0.9\n1,0.1\n");
    const auto model = load_external_scores(file.path.string(), Task::classification);
    CHECK(model->score_for_id(0) == 0.9);
    CHECK(model->score_for_id(1) == 0.1);
    CHECK_THROWS_WITH_AS(model->score_for_id(8), "no score for instance 8", std::runtime_error);
    CHECK_FALSE(model->supports_rescoring());
    const std::vector<double> row = {1.0};
    CHECK_THROWS_AS(model->score(row), std::runtime_error);
}

TEST_CASE("external score validation") {
    TempFile bad("uqx_scores_bad.csv", "id,score\n0,0.5\n1,1.3\n");
    CHECK_THROWS_WITH_AS(load_external_scores(bad.path.string(), Task::classification),
                         doctest::Contains("line 3"), std::runtime_error);
    // Regression scores may lie outside [0,1].
    CHECK(load_external_scores(bad.path.string(), Task::regression)->score_for_id(1) == 1.3);

    TempFile empty("uqx_scores_empty.csv", "");
    CHECK_THROWS_WITH_AS(load_external_scores(empty.path.string(), Task::classification),
                         doctest::Contains("no scores"), std::runtime_error);

    TempFile malformed("uqx_scores_malformed.csv", "id,score\nseven,0.5\n");
    CHECK_THROWS_WITH_AS(load_external_scores(malformed.path.string(), Task::classification),
                         doctest::Contains("line 2"), std::runtime_error);
}
