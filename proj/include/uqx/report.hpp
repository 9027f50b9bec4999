#pragma once

#include "uqx/dataset.hpp"
#include "uqx/explainer.hpp"
#include "uqx/model.hpp"
#include "uqx/triage.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace uqx {

/// Raised for unusable configuration (bad paths, incompatible flags); the
/// CLI maps it to exit code 2, other failures to exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string dataset_path;
    std::string target_column = "target";
    Task task = Task::classification;
    std::optional<double> threshold;      // regression: threshold mode
    double epsilon = 0.1;                 // regression: interval mode
    std::optional<double> binarize_geq;   // classification: binarise numeric targets
    std::size_t cal_size = 100;
    std::size_t test_size = 20;
    std::uint64_t seed = 42;
    std::optional<std::size_t> subsample; // cap dataset rows before splitting
    bool conjunctions = false;
    bool factual = false;
    double weight = 0.5;
    std::size_t top_k = 10;
    std::optional<FilterKind> filter;
    bool ensured_only = false;
    bool include_potential = false;
    std::string scores_path;              // external score table instead of a forest
    std::string out_dir;
    std::set<std::string> formats = {"json", "csv", "svg"};
    ForestParams forest;
};

/// Everything the commands share: loaded data, split, model and calibrator.
struct Pipeline {
    Dataset dataset;
    std::vector<std::size_t> row_origin; // dataset row -> row in the loaded file
    DataSplit parts;
    std::unique_ptr<ScoringModel> model;
    std::optional<Explainer> explainer;  // absent for external score tables
    std::optional<Calibrator> external_calibrator;
    ExplanationMode mode;

    const Calibrator& calibrator() const;
    /// Raw model score of a test instance (table lookup for external scores).
    double raw_test_score(std::size_t test_pos) const;
    /// Identifier of a test instance: its row in the loaded file.
    std::size_t instance_id(std::size_t test_pos) const;
};

Pipeline build_pipeline(const RunConfig& config);

ExplanationMode mode_from_config(const RunConfig& config);

/// Condition rendered against the dataset schema, e.g. "alcohol >= 11.4"
/// or "ocean_proximity == INLAND & median_income < 2.6".
std::string render_conditions(const std::vector<Condition>& conditions, const Dataset& schema);

struct InstanceCounts {
    std::size_t total = 0;
    std::size_t by_category[6] = {0, 0, 0, 0, 0, 0};
    std::size_t ensured = 0;
};

struct SummaryRow {
    std::size_t instances = 0;
    std::size_t excluded = 0; // undefined taxonomy (original estimate exactly 0.5)
    double total = 0.0;
    double by_category[6] = {0, 0, 0, 0, 0, 0};
    double ensured_count = 0.0;
    double ensured_proportion = 0.0;
};

/// Writes one JSON document per test instance under out/explanations/ and
/// returns the mean rule count per instance.
double run_explain(const RunConfig& config, std::ostream& log);

/// Averages the per-instance category counts and writes summary.csv.
SummaryRow run_summary(const RunConfig& config, std::ostream& log);

/// Calibrated (probability, uncertainty) per test instance as a scatter
/// plot plus JSON point list.
void run_global_map(const RunConfig& config, std::ostream& log);

/// Scatter and bar chart for one instance's ranked alternatives.
void run_rank_plot(const RunConfig& config, std::size_t instance_id, std::ostream& log);

/// Heatmap of the ranking metric over the feasible region.
void run_region_heatmap(double weight, const std::string& out_dir, std::ostream& log);

} // namespace uqx
