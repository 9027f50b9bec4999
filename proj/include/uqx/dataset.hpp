#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace uqx {

enum class Task { classification, regression };
enum class FeatureKind { numeric, categorical };

/// In-memory tabular dataset. Categorical cells hold the index of their
/// value in the per-feature alphabet (sorted lexicographically), numeric
/// cells hold the parsed value. `ground_truth` is a side channel filled by
/// the synthetic generators (known posterior or noise-free signal) and left
/// empty for loaded data.
struct Dataset {
    std::vector<std::string> feature_names;
    std::vector<FeatureKind> feature_kinds;
    std::vector<std::vector<std::string>> alphabets; // empty for numeric features
    std::vector<std::vector<double>> rows;
    std::vector<double> target;
    std::string target_name = "target";
    Task task = Task::classification;
    std::vector<double> ground_truth;

    std::size_t n_rows() const { return rows.size(); }
    std::size_t n_features() const { return feature_names.size(); }

    /// Values of one feature across all rows.
    std::vector<double> column(std::size_t feature) const;
};

/// Train/calibration/test partition of a dataset. Row indices refer to the
/// source dataset and are pairwise disjoint.
struct DataSplit {
    Dataset proper_training;
    Dataset calibration;
    Dataset test;
    std::vector<std::size_t> training_index;
    std::vector<std::size_t> calibration_index;
    std::vector<std::size_t> test_index;
    std::uint64_t seed = 0;
};

/// Loads a CSV with a header row. Columns whose non-empty values all parse
/// as numbers become numeric; anything else becomes categorical. For
/// classification, targets must be binary 0/1 unless `binarize_geq` is
/// given, in which case target >= threshold maps to 1. Malformed input is
/// reported with its 1-based line number.
Dataset load_csv(const std::string& path, const std::string& target_column, Task task,
                 std::optional<double> binarize_geq = std::nullopt);

/// Writes a dataset back to CSV (numeric values round-trip exactly).
void write_csv(const Dataset& data, const std::string& path);

/// Copy of the listed rows, schema shared.
Dataset select_rows(const Dataset& data, const std::vector<std::size_t>& indices);

/// Seeded uniform permutation; first test_size rows become the test set,
/// the next cal_size the calibration set, the remainder proper training.
DataSplit split(const Dataset& data, std::size_t cal_size, std::size_t test_size,
                std::uint64_t seed);

/// Two uniform features on [0,1]^2, label ~ Bernoulli(x1); the exact
/// posterior (= x1) is recorded in ground_truth.
Dataset synth_classification(std::size_t n, std::uint64_t seed);

/// y = 10*x1 + standard normal noise on [0,1]^2 features; the noise-free
/// signal is recorded in ground_truth.
Dataset synth_regression(std::size_t n, std::uint64_t seed);

/// Deterministic demo datasets shaped like common benchmark tables: a white
/// wine quality table (11 numeric features, integer quality target meant to
/// be binarised at >= 6) and a housing table (9 numeric features plus one
/// categorical, price target with median near 500). Both carry raw targets;
/// load the written CSV with the task and binarisation you need.
Dataset demo_quality(std::size_t n, std::uint64_t seed);
Dataset demo_housing(std::size_t n, std::uint64_t seed);

} // namespace uqx
