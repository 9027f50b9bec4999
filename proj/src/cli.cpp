#include "uqx/cli.hpp"

#include "uqx/report.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace uqx {

namespace {

struct CliState {
    RunConfig config;
    std::string task = "cls";
    std::string filter;
    std::string formats = "json,csv,svg";
    double threshold = 0.0;
    bool has_threshold = false;
    double binarize = 0.0;
    bool has_binarize = false;
    std::size_t subsample = 0;
    std::size_t instance_id = 0;
    std::size_t demo_rows_quality = 4898;
    std::size_t demo_rows_housing = 5000;
};

void add_data_options(CLI::App* cmd, CliState& s, bool needs_dataset = true) {
    auto* dataset = cmd->add_option("--dataset", s.config.dataset_path, "dataset CSV path");
    if (needs_dataset) dataset->required();
    cmd->add_option("--target", s.config.target_column, "target column name")
        ->capture_default_str();
    cmd->add_option("--task", s.task, "task: cls or reg")
        ->check(CLI::IsMember({"cls", "reg"}))
        ->capture_default_str();
    cmd->add_option("--threshold", s.threshold, "regression threshold t for P(y <= t)")
        ->each([&s](const std::string&) { s.has_threshold = true; });
    cmd->add_option("--epsilon", s.config.epsilon, "two-sided interval significance")
        ->capture_default_str();
    cmd->add_option("--binarize-geq", s.binarize,
                    "binarise classification targets: target >= value maps to 1")
        ->each([&s](const std::string&) { s.has_binarize = true; });
    cmd->add_option("--cal-size", s.config.cal_size, "calibration set size")
        ->capture_default_str();
    cmd->add_option("--test-size", s.config.test_size, "test set size")->capture_default_str();
    cmd->add_option("--seed", s.config.seed, "split and model seed")->capture_default_str();
    cmd->add_option("--subsample", s.subsample, "cap dataset rows before splitting (seeded)");
    cmd->add_option("--trees", s.config.forest.n_trees, "forest size")->capture_default_str();
    cmd->add_option("--scores", s.config.scores_path,
                    "external id,score CSV instead of the built-in forest");
}

void add_ranking_options(CLI::App* cmd, CliState& s) {
    cmd->add_flag("--conjunctions", s.config.conjunctions, "add pairwise conjunction rules");
    cmd->add_option("--weight", s.config.weight, "ranking weight in [-1, 1]")
        ->check(CLI::Range(-1.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--top-k", s.config.top_k, "number of ranked rules to select")
        ->capture_default_str();
    cmd->add_option("--filter", s.filter, "rule filter: counter, semi, super or ensured")
        ->check(CLI::IsMember({"counter", "semi", "super", "ensured"}));
    cmd->add_flag("--include-potential", s.config.include_potential,
                  "include potential categories in the filter");
}

void add_output_options(CLI::App* cmd, CliState& s) {
    cmd->add_option("--out", s.config.out_dir, "output directory")->required();
    cmd->add_option("--format", s.formats, "comma-separated subset of json,csv,svg")
        ->capture_default_str();
}

void finalize(CliState& s) {
    s.config.task = s.task == "reg" ? Task::regression : Task::classification;
    if (s.has_threshold) s.config.threshold = s.threshold;
    if (s.has_binarize) s.config.binarize_geq = s.binarize;
    if (s.subsample > 0) s.config.subsample = s.subsample;
    if (s.filter == "counter") s.config.filter = FilterKind::counter;
    else if (s.filter == "semi") s.config.filter = FilterKind::semi;
    else if (s.filter == "super") s.config.filter = FilterKind::super;
    else if (s.filter == "ensured") s.config.ensured_only = true;
    s.config.formats.clear();
    std::stringstream stream(s.formats);
    std::string item;
    while (std::getline(stream, item, ','))
        if (!item.empty()) s.config.formats.insert(item);
    s.config.forest.rng_seed = s.config.seed;
}

int write_demo_data(const CliState& s, const std::string& out_dir, std::uint64_t seed) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const Dataset quality = demo_quality(s.demo_rows_quality, seed);
    const Dataset housing = demo_housing(s.demo_rows_housing, seed + 1);
    const fs::path quality_path = fs::path(out_dir) / "demo_quality.csv";
    const fs::path housing_path = fs::path(out_dir) / "demo_housing.csv";
    write_csv(quality, quality_path.string());
    write_csv(housing, housing_path.string());
    std::cout << "wrote " << quality_path.string() << " (" << quality.n_rows() << " rows)\n"
              << "wrote " << housing_path.string() << " (" << housing.n_rows() << " rows)\n";
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"calibrated, uncertainty-aware explanations for tabular predictions"};
    app.require_subcommand(1);

    CliState s;
    std::uint64_t demo_seed = 7;
    std::string demo_out;

    auto* explain = app.add_subcommand("explain", "write one explanation JSON per test instance");
    add_data_options(explain, s);
    add_ranking_options(explain, s);
    add_output_options(explain, s);
    explain->add_flag("--factual", s.config.factual, "factual feature weights instead of alternatives");

    auto* summary = app.add_subcommand("summary", "average category counts over the test set");
    add_data_options(summary, s);
    add_ranking_options(summary, s);
    add_output_options(summary, s);

    auto* global_map = app.add_subcommand("global-map", "test-set probability/uncertainty scatter");
    add_data_options(global_map, s);
    add_output_options(global_map, s);

    auto* rank_plot = app.add_subcommand("rank-plot", "scatter and bar chart for one instance");
    add_data_options(rank_plot, s);
    add_ranking_options(rank_plot, s);
    add_output_options(rank_plot, s);
    rank_plot->add_option("--instance", s.instance_id, "instance id (row in the loaded file)")
        ->required();

    auto* heatmap = app.add_subcommand("region-heatmap", "ranking metric over the feasible region");
    heatmap->add_option("--weight", s.config.weight, "ranking weight in [-1, 1]")
        ->check(CLI::Range(-1.0, 1.0))
        ->capture_default_str();
    heatmap->add_option("--out", s.config.out_dir, "output directory")->required();

    auto* demo = app.add_subcommand("demo-data", "write bundled demo datasets");
    demo->add_option("--out", demo_out, "output directory")->required();
    demo->add_option("--seed", demo_seed, "generator seed")->capture_default_str();
    demo->add_option("--rows-quality", s.demo_rows_quality, "rows in the wine-style table")
        ->capture_default_str();
    demo->add_option("--rows-housing", s.demo_rows_housing, "rows in the housing-style table")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        finalize(s);
        if (explain->parsed()) {
            run_explain(s.config, std::cout);
        } else if (summary->parsed()) {
            run_summary(s.config, std::cout);
        } else if (global_map->parsed()) {
            run_global_map(s.config, std::cout);
        } else if (rank_plot->parsed()) {
            run_rank_plot(s.config, s.instance_id, std::cout);
        } else if (heatmap->parsed()) {
            run_region_heatmap(s.config.weight, s.config.out_dir, std::cout);
        } else if (demo->parsed()) {
            return write_demo_data(s, demo_out, demo_seed);
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace uqx
