#include "uqx/dataset.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

using namespace uqx;

namespace {

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

TEST_CASE("csv loading infers kinds and parses values") {
    TempFile file("uqx_mixed.csv",
                  "a,b,colour,target\n"
                  "1.5,2,red,0\n"
                  "2.5,3,blue,1\n"
                  "0.5,9,red,1\n");
    const Dataset data = load_csv(file.path.string(), "target", Task::classification);
    REQUIRE(data.n_rows() == 3);
    REQUIRE(data.n_features() == 3);
    CHECK(data.feature_names == std::vector<std::string>{"a", "b", "colour"});
    CHECK(data.feature_kinds[0] == FeatureKind::numeric);
    CHECK(data.feature_kinds[2] == FeatureKind::categorical);
    CHECK(data.alphabets[2] == std::vector<std::string>{"blue", "red"});
    CHECK(data.rows[0][2] == 1.0); // "red" sorts after "blue"
    CHECK(data.rows[1][2] == 0.0);
    CHECK(data.target == std::vector<double>{0.0, 1.0, 1.0});
}

TEST_CASE("csv errors carry line numbers") {
    TempFile ragged("uqx_ragged.csv", "a,b,target\n1,2,0\n1,2\n");
    CHECK_THROWS_WITH_AS(load_csv(ragged.path.string(), "target", Task::regression),
                         doctest::Contains("line 3"), std::runtime_error);

    TempFile missing("uqx_missing.csv", "a,b,target\n1,,0\n");
    CHECK_THROWS_WITH_AS(load_csv(missing.path.string(), "target", Task::regression),
                         doctest::Contains("line 2"), std::runtime_error);

    TempFile fine("uqx_fine.csv", "a,target\n1,0\n");
    CHECK_THROWS_WITH_AS(load_csv(fine.path.string(), "missing", Task::regression),
                         doctest::Contains("missing"), std::runtime_error);
}

TEST_CASE("classification targets must be binary unless binarised") {
    TempFile file("uqx_quality.csv", "a,quality\n1,5\n2,7\n3,6\n");
    CHECK_THROWS_AS(load_csv(file.path.string(), "quality", Task::classification),
                    std::runtime_error);
    const Dataset data = load_csv(file.path.string(), "quality", Task::classification, 6.0);
    CHECK(data.target == std::vector<double>{0.0, 1.0, 1.0});
}

TEST_CASE("write then load round-trips") {
    Dataset data;
    data.task = Task::regression;
    data.feature_names = {"x", "tag"};
    data.feature_kinds = {FeatureKind::numeric, FeatureKind::categorical};
    data.alphabets = {{}, {"high", "low"}};
    data.rows = {{0.1234567890123456, 0.0}, {-3.25, 1.0}, {17.0, 0.0}};
    data.target = {1.5, 2.5, -0.125};
    const auto path = std::filesystem::temp_directory_path() / "uqx_roundtrip.csv";
    write_csv(data, path.string());
    const Dataset back = load_csv(path.string(), "target", Task::regression);
    std::filesystem::remove(path);
    CHECK(back.feature_names == data.feature_names);
    CHECK(back.feature_kinds == data.feature_kinds);
    CHECK(back.alphabets == data.alphabets);
    CHECK(back.rows == data.rows);
    CHECK(back.target == data.target);
}

TEST_CASE("split produces exact, disjoint, seed-stable parts") {
    const Dataset data = synth_classification(100, 5);
    const DataSplit s = split(data, 30, 20, 99);
    CHECK(s.test.n_rows() == 20);
    CHECK(s.calibration.n_rows() == 30);
    CHECK(s.proper_training.n_rows() == 50);

    std::set<std::size_t> seen;
    for (std::size_t i : s.test_index) seen.insert(i);
    for (std::size_t i : s.calibration_index) seen.insert(i);
    for (std::size_t i : s.training_index) seen.insert(i);
    CHECK(seen.size() == 100);

    const DataSplit again = split(data, 30, 20, 99);
    CHECK(again.test_index == s.test_index);
    CHECK(again.calibration_index == s.calibration_index);

    const DataSplit other = split(data, 30, 20, 100);
    CHECK(other.test_index != s.test_index);

    CHECK_THROWS_AS(split(data, 80, 20, 1), std::invalid_argument);
}

TEST_CASE("synthetic classification matches its recorded posterior") {
    const Dataset data = synth_classification(10000, 3);
    REQUIRE(data.n_rows() == 10000);
    double positives = 0.0;
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        CHECK(data.ground_truth[i] == data.rows[i][0]);
        positives += data.target[i];
    }
    CHECK(positives / 10000.0 == doctest::Approx(0.5).epsilon(0.04));

    const Dataset again = synth_classification(10000, 3);
    CHECK(again.rows == data.rows);
    CHECK(again.target == data.target);
}

TEST_CASE("synthetic regression noise is standard normal") {
    const Dataset data = synth_regression(10000, 4);
    double sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        const double r = data.target[i] - data.ground_truth[i];
        sum += r;
        sq += r * r;
    }
    const double mean = sum / 10000.0;
    const double stdev = std::sqrt(sq / 10000.0 - mean * mean);
    CHECK(stdev == doctest::Approx(1.0).epsilon(0.05));
    CHECK(synth_regression(1, 0).n_rows() == 1);
}

TEST_CASE("demo datasets are deterministic and plausibly shaped") {
    const Dataset quality = demo_quality(500, 42);
    CHECK(quality.n_features() == 11);
    CHECK(quality.task == Task::classification);
    for (double q : quality.target) {
        CHECK(q >= 3.0);
        CHECK(q <= 9.0);
    }
    const Dataset again = demo_quality(500, 42);
    CHECK(again.rows == quality.rows);

    const Dataset housing = demo_housing(500, 42);
    CHECK(housing.n_features() == 9);
    CHECK(housing.feature_kinds[8] == FeatureKind::categorical);
    CHECK(housing.task == Task::regression);
}
