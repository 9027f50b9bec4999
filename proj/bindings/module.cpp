#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "uqx/cpd.hpp"
#include "uqx/dataset.hpp"
#include "uqx/explainer.hpp"
#include "uqx/isotonic.hpp"
#include "uqx/model.hpp"
#include "uqx/report.hpp"
#include "uqx/triage.hpp"
#include "uqx/venn_abers.hpp"

#include <optional>
#include <vector>

namespace py = pybind11;
using namespace uqx;

PYBIND11_MODULE(_core, m) {
    m.doc() = "calibrated, uncertainty-aware explanations for tabular predictions";

    py::enum_<Task>(m, "Task")
        .value("classification", Task::classification)
        .value("regression", Task::regression);
    py::enum_<FeatureKind>(m, "FeatureKind")
        .value("numeric", FeatureKind::numeric)
        .value("categorical", FeatureKind::categorical);
    py::enum_<TiePolicy>(m, "TiePolicy")
        .value("fixed_half", TiePolicy::fixed_half)
        .value("seeded_random", TiePolicy::seeded_random);
    py::enum_<IntervalSide>(m, "IntervalSide")
        .value("lower_bounded", IntervalSide::lower_bounded)
        .value("upper_bounded", IntervalSide::upper_bounded);
    py::enum_<IntervalMode>(m, "IntervalMode")
        .value("mean", IntervalMode::mean)
        .value("regularised", IntervalMode::regularised);
    py::enum_<Category>(m, "Category")
        .value("counter_factual", Category::counter_factual)
        .value("counter_potential", Category::counter_potential)
        .value("semi_factual", Category::semi_factual)
        .value("semi_potential", Category::semi_potential)
        .value("super_factual", Category::super_factual)
        .value("super_potential", Category::super_potential);
    py::enum_<FilterKind>(m, "FilterKind")
        .value("counter", FilterKind::counter)
        .value("semi", FilterKind::semi)
        .value("super", FilterKind::super);
    py::enum_<ExplanationKind>(m, "ExplanationKind")
        .value("factual", ExplanationKind::factual)
        .value("alternative", ExplanationKind::alternative);
    py::enum_<Condition::Op>(m, "ConditionOp")
        .value("equals", Condition::Op::equals)
        .value("less_than", Condition::Op::less_than)
        .value("geq", Condition::Op::geq);
    py::enum_<ModeKind>(m, "ModeKind")
        .value("classification", ModeKind::classification)
        .value("regression_interval", ModeKind::regression_interval)
        .value("regression_threshold", ModeKind::regression_threshold);

    py::class_<IsotonicFit>(m, "IsotonicFit")
        .def("__call__", &IsotonicFit::operator())
        .def_property_readonly("breakpoints", &IsotonicFit::breakpoints);
    m.def("fit_isotonic",
          [](const std::vector<std::pair<double, double>>& points) { return fit_isotonic(points); },
          py::arg("points"), "Least-squares non-decreasing fit via pool-adjacent-violators.");

    py::class_<ProbabilityInterval>(m, "ProbabilityInterval")
        .def_readonly("low", &ProbabilityInterval::low)
        .def_readonly("high", &ProbabilityInterval::high)
        .def_readonly("estimate", &ProbabilityInterval::estimate)
        .def_property_readonly("uncertainty", &ProbabilityInterval::uncertainty)
        .def("__repr__", [](const ProbabilityInterval& p) {
            return "ProbabilityInterval(low=" + std::to_string(p.low) +
                   ", high=" + std::to_string(p.high) + ", estimate=" + std::to_string(p.estimate) +
                   ")";
        });
    m.def("regularise", &regularise, py::arg("low"), py::arg("high"),
          "Log-loss-minimising single estimate high / (1 - low + high).");
    m.def(
        "va_predict",
        [](const std::vector<double>& scores, const std::vector<int>& labels, double test_score) {
            return va_predict(scores, labels, test_score);
        },
        py::arg("scores"), py::arg("labels"), py::arg("test_score"),
        "Venn-Abers probability interval with regularised estimate.");

    py::class_<VennAbersCalibrator>(m, "VennAbersCalibrator")
        .def(py::init([](const std::vector<double>& scores, const std::vector<int>& labels) {
                 return VennAbersCalibrator(scores, labels);
             }),
             py::arg("scores"), py::arg("labels"))
        .def("predict", &VennAbersCalibrator::predict, py::arg("test_score"))
        .def("__len__", &VennAbersCalibrator::size);

    py::class_<ConformalPredictiveDistribution>(m, "ConformalPredictiveDistribution")
        .def(py::init([](const std::vector<double>& residuals, double point_prediction,
                         TiePolicy tie, std::uint64_t seed) {
                 return ConformalPredictiveDistribution(residuals, point_prediction, tie, seed);
             }),
             py::arg("residuals"), py::arg("point_prediction"),
             py::arg("tie") = TiePolicy::fixed_half, py::arg("seed") = 0)
        .def("evaluate", &ConformalPredictiveDistribution::evaluate, py::arg("y"))
        .def("interval_two_sided", &ConformalPredictiveDistribution::interval_two_sided,
             py::arg("epsilon"))
        .def("interval_one_sided", &ConformalPredictiveDistribution::interval_one_sided,
             py::arg("epsilon"), py::arg("side"))
        .def("median", &ConformalPredictiveDistribution::median)
        .def("threshold_prob", &ConformalPredictiveDistribution::threshold_prob, py::arg("t"))
        .def_property_readonly("c_values", &ConformalPredictiveDistribution::c_values)
        .def("__len__", &ConformalPredictiveDistribution::size);

    py::class_<Dataset>(m, "Dataset")
        .def(py::init<>())
        .def_readwrite("feature_names", &Dataset::feature_names)
        .def_readwrite("feature_kinds", &Dataset::feature_kinds)
        .def_readwrite("alphabets", &Dataset::alphabets)
        .def_readwrite("rows", &Dataset::rows)
        .def_readwrite("target", &Dataset::target)
        .def_readwrite("target_name", &Dataset::target_name)
        .def_readwrite("task", &Dataset::task)
        .def_readwrite("ground_truth", &Dataset::ground_truth)
        .def_property_readonly("n_rows", &Dataset::n_rows)
        .def_property_readonly("n_features", &Dataset::n_features)
        .def("column", &Dataset::column, py::arg("feature"));

    py::class_<DataSplit>(m, "DataSplit")
        .def_readonly("proper_training", &DataSplit::proper_training)
        .def_readonly("calibration", &DataSplit::calibration)
        .def_readonly("test", &DataSplit::test)
        .def_readonly("training_index", &DataSplit::training_index)
        .def_readonly("calibration_index", &DataSplit::calibration_index)
        .def_readonly("test_index", &DataSplit::test_index)
        .def_readonly("seed", &DataSplit::seed);

    m.def("load_csv", &load_csv, py::arg("path"), py::arg("target_column"), py::arg("task"),
          py::arg("binarize_geq") = std::nullopt);
    m.def("write_csv", &write_csv, py::arg("dataset"), py::arg("path"));
    m.def("split", &split, py::arg("dataset"), py::arg("cal_size"), py::arg("test_size"),
          py::arg("seed"));
    m.def("synth_classification", &synth_classification, py::arg("n"), py::arg("seed"));
    m.def("synth_regression", &synth_regression, py::arg("n"), py::arg("seed"));
    m.def("demo_quality", &demo_quality, py::arg("n"), py::arg("seed"));
    m.def("demo_housing", &demo_housing, py::arg("n"), py::arg("seed"));

    py::class_<ForestParams>(m, "ForestParams")
        .def(py::init([](int n_trees, std::optional<int> max_depth, int min_samples_leaf,
                         std::uint64_t rng_seed, bool bootstrap, std::optional<int> max_features) {
                 return ForestParams{n_trees, max_depth, min_samples_leaf, rng_seed, bootstrap,
                                     max_features};
             }),
             py::arg("n_trees") = 100, py::arg("max_depth") = std::nullopt,
             py::arg("min_samples_leaf") = 2, py::arg("rng_seed") = 42,
             py::arg("bootstrap") = true, py::arg("max_features") = std::nullopt)
        .def_readwrite("n_trees", &ForestParams::n_trees)
        .def_readwrite("max_depth", &ForestParams::max_depth)
        .def_readwrite("min_samples_leaf", &ForestParams::min_samples_leaf)
        .def_readwrite("rng_seed", &ForestParams::rng_seed)
        .def_readwrite("bootstrap", &ForestParams::bootstrap)
        .def_readwrite("max_features", &ForestParams::max_features);

    py::class_<ScoringModel>(m, "ScoringModel")
        .def("score",
             [](const ScoringModel& model, const std::vector<double>& instance) {
                 return model.score(instance);
             },
             py::arg("instance"))
        .def_property_readonly("task", &ScoringModel::task)
        .def_property_readonly("supports_rescoring", &ScoringModel::supports_rescoring);
    py::class_<RandomForest, ScoringModel>(m, "RandomForest")
        .def_property_readonly("n_trees", &RandomForest::n_trees);
    py::class_<ExternalScores, ScoringModel>(m, "ExternalScores")
        .def("score_for_id", &ExternalScores::score_for_id, py::arg("id"));
    m.def("train_forest", &train_forest, py::arg("training_set"),
          py::arg("params") = ForestParams{});
    m.def("load_external_scores", &load_external_scores, py::arg("path"), py::arg("task"));

    py::class_<ExplanationMode>(m, "ExplanationMode")
        .def_static("classification", &ExplanationMode::classification)
        .def_static("regression_interval", &ExplanationMode::regression_interval,
                    py::arg("epsilon"))
        .def_static("regression_threshold", &ExplanationMode::regression_threshold,
                    py::arg("threshold"))
        .def_readonly("kind", &ExplanationMode::kind)
        .def_readonly("epsilon", &ExplanationMode::epsilon)
        .def_readonly("threshold", &ExplanationMode::threshold)
        .def_property_readonly("probabilistic", &ExplanationMode::probabilistic);

    py::class_<CalibratedPrediction>(m, "CalibratedPrediction")
        .def_readonly("estimate", &CalibratedPrediction::estimate)
        .def_readonly("low", &CalibratedPrediction::low)
        .def_readonly("high", &CalibratedPrediction::high)
        .def_readonly("raw_score", &CalibratedPrediction::raw_score)
        .def_property_readonly("uncertainty", &CalibratedPrediction::uncertainty);

    py::class_<Calibrator>(m, "Calibrator")
        .def_static("classification", &Calibrator::classification, py::arg("cal_scores"),
                    py::arg("cal_labels"))
        .def_static("regression_interval", &Calibrator::regression_interval, py::arg("residuals"),
                    py::arg("epsilon"), py::arg("tie") = TiePolicy::fixed_half,
                    py::arg("seed") = 0)
        .def_static("regression_threshold", &Calibrator::regression_threshold,
                    py::arg("cal_predictions"), py::arg("cal_targets"), py::arg("threshold"),
                    py::arg("tie") = TiePolicy::fixed_half, py::arg("seed") = 0)
        .def("predict", &Calibrator::predict, py::arg("raw_score"));

    py::class_<Condition>(m, "Condition")
        .def_readonly("feature", &Condition::feature)
        .def_readonly("op", &Condition::op)
        .def_readonly("value", &Condition::value)
        .def("covers", &Condition::covers, py::arg("value"));

    py::class_<FeatureRule>(m, "FeatureRule")
        .def_readonly("conditions", &FeatureRule::conditions)
        .def_readonly("estimate", &FeatureRule::estimate)
        .def_readonly("low", &FeatureRule::low)
        .def_readonly("high", &FeatureRule::high)
        .def_readonly("is_conjunctive", &FeatureRule::is_conjunctive)
        .def_readonly("generation_index", &FeatureRule::generation_index)
        .def_property_readonly("uncertainty", &FeatureRule::uncertainty);

    py::class_<Explanation>(m, "Explanation")
        .def_readonly("instance", &Explanation::instance)
        .def_readonly("mode", &Explanation::mode)
        .def_readonly("estimate", &Explanation::estimate)
        .def_readonly("low", &Explanation::low)
        .def_readonly("high", &Explanation::high)
        .def_readonly("rules", &Explanation::rules)
        .def_readonly("kind", &Explanation::kind)
        .def_property_readonly("uncertainty", &Explanation::uncertainty);

    m.def(
        "discretize_feature",
        [](const std::vector<double>& cal_values, double instance_value, int feature) {
            return discretize_feature(cal_values, instance_value, feature);
        },
        py::arg("cal_values"), py::arg("instance_value"), py::arg("feature") = 0);
    m.def(
        "decile_boundaries",
        [](const std::vector<double>& values) { return decile_boundaries(values); },
        py::arg("values"));

    py::class_<ExplainerOptions>(m, "ExplainerOptions")
        .def(py::init<>())
        .def_readwrite("tie", &ExplainerOptions::tie)
        .def_readwrite("seed", &ExplainerOptions::seed)
        .def_readwrite("conjunction_value_cap", &ExplainerOptions::conjunction_value_cap);

    py::class_<Explainer>(m, "Explainer")
        .def(py::init<const ScoringModel&, const Dataset&, ExplanationMode, ExplainerOptions>(),
             py::arg("model"), py::arg("calibration"), py::arg("mode"),
             py::arg("options") = ExplainerOptions{}, py::keep_alive<1, 2>())
        .def("calibrated_predict",
             [](const Explainer& e, const std::vector<double>& instance) {
                 return e.calibrated_predict(instance);
             },
             py::arg("instance"))
        .def("explain_alternatives",
             [](const Explainer& e, const std::vector<double>& instance) {
                 return e.explain_alternatives(instance);
             },
             py::arg("instance"))
        .def("explain_factual",
             [](const Explainer& e, const std::vector<double>& instance) {
                 return e.explain_factual(instance);
             },
             py::arg("instance"))
        .def("add_conjunctions", &Explainer::add_conjunctions, py::arg("explanation"),
             py::arg("max_order") = 2);

    py::class_<TriagedRule>(m, "TriagedRule")
        .def_readonly("rule", &TriagedRule::rule)
        .def_readonly("category", &TriagedRule::category)
        .def_readonly("ensured", &TriagedRule::ensured)
        .def_readonly("rank", &TriagedRule::rank)
        .def_readonly("p_hat", &TriagedRule::p_hat)
        .def_readonly("uncertainty", &TriagedRule::uncertainty);

    m.def("category_name", &category_name, py::arg("category"));
    m.def("predicted_class_prob", &predicted_class_prob, py::arg("p"));
    m.def(
        "categorize",
        [](double low, double high, double estimate, double original_estimate) {
            return categorize(low, high, estimate, original_estimate);
        },
        py::arg("low"), py::arg("high"), py::arg("estimate"), py::arg("original_estimate"));
    m.def("is_ensured", &is_ensured, py::arg("rule_uncertainty"), py::arg("original_uncertainty"));
    m.def("rank_score", &rank_score, py::arg("p_hat"), py::arg("uncertainty"), py::arg("w"));
    m.def("rank_rules", &rank_rules, py::arg("rules"), py::arg("w"), py::arg("top_k"));
    m.def("filter_category", &filter_category, py::arg("rules"), py::arg("kind"),
          py::arg("include_potential"));
    m.def("filter_ensured", &filter_ensured, py::arg("rules"));
    m.def("feasible", &feasible, py::arg("p"), py::arg("u"),
          py::arg("mode") = IntervalMode::regularised);
    m.def("triage_explanation", &triage_explanation, py::arg("explanation"), py::arg("w"));
    m.def("render_conditions", &render_conditions, py::arg("conditions"), py::arg("schema"));
}
