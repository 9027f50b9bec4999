#include "uqx/report.hpp"

#include "uqx/rng.hpp"
#include "uqx/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace uqx {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

// Category colours: red for counter, yellow for semi, green for super;
// the lighter shade marks the potential variant.
const char* category_colour(Category c) {
    switch (c) {
        case Category::counter_factual: return "#d62728";
        case Category::counter_potential: return "#f2a29f";
        case Category::semi_factual: return "#dfa800";
        case Category::semi_potential: return "#f3dd90";
        case Category::super_factual: return "#2ca02c";
        case Category::super_potential: return "#a9dca9";
    }
    return "#888888";
}

constexpr const char* kClassPositive = "#d62728"; // crosses
constexpr const char* kClassNegative = "#1f77b4"; // dots
constexpr const char* kOriginalMarker = "#d62728";
constexpr const char* kRuleMarker = "#7fb3d5";
constexpr const char* kSelectedMarker = "#e67e22";
constexpr const char* kBoundary = "#9aa0a6";
constexpr const char* kOriginalBand = "#f6c5c3";

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

class SvgBuilder {
public:
    SvgBuilder(double width, double height) : width_(width), height_(height) {}

    void rect(double x, double y, double w, double h, const std::string& fill,
              double opacity = 1.0) {
        body_ << "<rect x=\"" << px(x) << "\" y=\"" << px(y) << "\" width=\"" << px(w)
              << "\" height=\"" << px(h) << "\" fill=\"" << fill << "\"";
        if (opacity != 1.0) body_ << " fill-opacity=\"" << px(opacity) << "\"";
        body_ << "/>\n";
    }

    void line(double x1, double y1, double x2, double y2, const std::string& colour,
              double width = 1.0) {
        body_ << "<line x1=\"" << px(x1) << "\" y1=\"" << px(y1) << "\" x2=\"" << px(x2)
              << "\" y2=\"" << px(y2) << "\" stroke=\"" << colour << "\" stroke-width=\""
              << px(width) << "\"/>\n";
    }

    void circle(double cx, double cy, double r, const std::string& fill,
                const std::string& stroke = "none", double stroke_width = 1.0) {
        body_ << "<circle cx=\"" << px(cx) << "\" cy=\"" << px(cy) << "\" r=\"" << px(r)
              << "\" fill=\"" << fill << "\"";
        if (stroke != "none")
            body_ << " stroke=\"" << stroke << "\" stroke-width=\"" << px(stroke_width) << "\"";
        body_ << "/>\n";
    }

    void cross(double cx, double cy, double r, const std::string& colour) {
        line(cx - r, cy - r, cx + r, cy + r, colour, 1.6);
        line(cx - r, cy + r, cx + r, cy - r, colour, 1.6);
    }

    void polyline(const std::vector<std::pair<double, double>>& points, const std::string& colour,
                  double width = 1.0, const std::string& dash = "") {
        body_ << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"" << px(width)
              << "\"";
        if (!dash.empty()) body_ << " stroke-dasharray=\"" << dash << "\"";
        body_ << " points=\"";
        for (const auto& [x, y] : points) body_ << px(x) << ',' << px(y) << ' ';
        body_ << "\"/>\n";
    }

    void text(double x, double y, const std::string& s, double size = 12.0,
              const std::string& anchor = "start", const std::string& colour = "#333333") {
        body_ << "<text x=\"" << px(x) << "\" y=\"" << px(y) << "\" font-size=\"" << px(size)
              << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\" fill=\"" << colour
              << "\">" << xml_escape(s) << "</text>\n";
    }

    std::string str() const {
        std::ostringstream out;
        out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(width_) << "\" height=\""
            << px(height_) << "\" viewBox=\"0 0 " << px(width_) << ' ' << px(height_) << "\">\n"
            << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n"
            << body_.str() << "</svg>\n";
        return out.str();
    }

private:
    double width_;
    double height_;
    std::ostringstream body_;
};

// Maps the unit square (probability right, uncertainty up) onto pixels.
struct PlotFrame {
    double width = 640.0, height = 480.0;
    double left = 64.0, right = 24.0, top = 40.0, bottom = 56.0;

    double x(double p) const { return left + p * (width - left - right); }
    double y(double u) const { return height - bottom - u * (height - top - bottom); }

    void axes(SvgBuilder& svg, const std::string& x_label, const std::string& y_label,
              const std::string& title) const {
        svg.line(x(0), y(0), x(1), y(0), "#333333", 1.2);
        svg.line(x(0), y(0), x(0), y(1), "#333333", 1.2);
        for (int i = 0; i <= 5; ++i) {
            const double v = static_cast<double>(i) / 5.0;
            svg.line(x(v), y(0), x(v), y(0) + 4, "#333333", 1.0);
            svg.text(x(v), y(0) + 18, tick_label(v), 11, "middle");
            svg.line(x(0) - 4, y(v), x(0), y(v), "#333333", 1.0);
            svg.text(x(0) - 8, y(v) + 4, tick_label(v), 11, "end");
        }
        svg.text((x(0) + x(1)) / 2.0, height - 12, x_label, 13, "middle");
        svg.text(14, (y(0) + y(1)) / 2.0, y_label, 13, "middle");
        if (!title.empty()) svg.text((x(0) + x(1)) / 2.0, 22, title, 14, "middle");
    }

    // Boundary of the regularised feasible region.
    void feasible_boundary(SvgBuilder& svg) const {
        std::vector<std::pair<double, double>> lower, upper;
        for (int i = 0; i <= 100; ++i) {
            const double u = static_cast<double>(i) / 100.0;
            lower.emplace_back(x(u / (1.0 + u)), y(u));
            upper.emplace_back(x(1.0 / (1.0 + u)), y(u));
        }
        svg.polyline(lower, kBoundary, 1.0, "4 3");
        svg.polyline(upper, kBoundary, 1.0, "4 3");
    }
};

struct Rgb {
    double r, g, b;
};

std::string viridis(double t) {
    static const Rgb anchors[5] = {
        {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
    t = std::clamp(t, 0.0, 1.0);
    const double pos = t * 4.0;
    const int i = std::min(3, static_cast<int>(pos));
    const double f = pos - i;
    const Rgb c = {anchors[i].r + f * (anchors[i + 1].r - anchors[i].r),
                   anchors[i].g + f * (anchors[i + 1].g - anchors[i].g),
                   anchors[i].b + f * (anchors[i + 1].b - anchors[i].b)};
    char buf[10];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", static_cast<int>(std::lround(c.r)),
                  static_cast<int>(std::lround(c.g)), static_cast<int>(std::lround(c.b)));
    return buf;
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

bool wants(const RunConfig& config, const char* format) {
    return config.formats.count(format) > 0;
}

struct Triaged {
    bool defined = false;
    std::vector<TriagedRule> rules;
    std::vector<int> selected; // generation indices in ranked order
};

Triaged triage_and_select(const Explanation& explanation, const RunConfig& config) {
    Triaged out;
    if (!explanation.mode.probabilistic() || explanation.kind != ExplanationKind::alternative ||
        explanation.estimate == 0.5)
        return out;
    out.defined = true;
    out.rules = triage_explanation(explanation, config.weight);
    std::vector<TriagedRule> pool = out.rules;
    if (config.filter) pool = filter_category(pool, *config.filter, config.include_potential);
    if (config.ensured_only) pool = filter_ensured(pool);
    if (!pool.empty())
        for (const TriagedRule& r : rank_rules(std::move(pool), config.weight, config.top_k))
            out.selected.push_back(r.rule.generation_index);
    return out;
}

ordered_json mode_json(const ExplanationMode& mode) {
    ordered_json j;
    switch (mode.kind) {
        case ModeKind::classification: j["kind"] = "classification"; break;
        case ModeKind::regression_interval:
            j["kind"] = "regression_interval";
            j["epsilon"] = mode.epsilon;
            break;
        case ModeKind::regression_threshold:
            j["kind"] = "regression_threshold";
            j["threshold"] = mode.threshold;
            break;
    }
    return j;
}

ordered_json instance_values_json(const Dataset& schema, const std::vector<double>& instance) {
    ordered_json j;
    for (std::size_t f = 0; f < schema.n_features(); ++f) {
        if (schema.feature_kinds[f] == FeatureKind::categorical)
            j[schema.feature_names[f]] = schema.alphabets[f][static_cast<std::size_t>(instance[f])];
        else
            j[schema.feature_names[f]] = instance[f];
    }
    return j;
}

ordered_json explanation_json(const Dataset& schema, const RunConfig& config,
                              std::size_t instance_id, const Explanation& explanation,
                              const Triaged& triaged) {
    ordered_json doc;
    doc["schema_version"] = 1;
    doc["instance_id"] = instance_id;
    doc["mode"] = mode_json(explanation.mode);
    doc["kind"] = explanation.kind == ExplanationKind::factual ? "factual" : "alternative";
    doc["instance"] = instance_values_json(schema, explanation.instance);

    ordered_json pred;
    pred["estimate"] = explanation.estimate;
    pred["low"] = explanation.low;
    pred["high"] = explanation.high;
    pred["uncertainty"] = explanation.uncertainty();
    if (explanation.mode.probabilistic())
        pred["predicted_class"] = explanation.estimate > 0.5 ? 1 : 0;
    doc["prediction"] = pred;

    if (explanation.kind == ExplanationKind::alternative) {
        ordered_json ranking;
        ranking["weight"] = config.weight;
        ranking["top_k"] = config.top_k;
        if (config.ensured_only)
            ranking["filter"] = "ensured";
        else if (config.filter) {
            switch (*config.filter) {
                case FilterKind::counter: ranking["filter"] = "counter"; break;
                case FilterKind::semi: ranking["filter"] = "semi"; break;
                case FilterKind::super: ranking["filter"] = "super"; break;
            }
        } else {
            ranking["filter"] = "none";
        }
        ranking["include_potential"] = config.include_potential;
        doc["ranking"] = ranking;
        doc["taxonomy_defined"] = triaged.defined;
    }

    ordered_json rules = ordered_json::array();
    for (std::size_t i = 0; i < explanation.rules.size(); ++i) {
        const FeatureRule& rule = explanation.rules[i];
        ordered_json r;
        r["index"] = rule.generation_index;
        r["condition"] = render_conditions(rule.conditions, schema);
        ordered_json features = ordered_json::array();
        for (const Condition& c : rule.conditions)
            features.push_back(schema.feature_names[static_cast<std::size_t>(c.feature)]);
        r["features"] = features;
        if (explanation.kind == ExplanationKind::factual) {
            r["weight"] = rule.estimate;
            r["weight_low"] = rule.low;
            r["weight_high"] = rule.high;
        } else {
            r["is_conjunctive"] = rule.is_conjunctive;
            r["estimate"] = rule.estimate;
            r["low"] = rule.low;
            r["high"] = rule.high;
            r["uncertainty"] = rule.uncertainty();
            if (triaged.defined) {
                const TriagedRule& t = triaged.rules[i];
                r["category"] = category_name(t.category);
                r["ensured"] = t.ensured;
                r["p_hat"] = t.p_hat;
                r["rank_score"] = t.rank;
            } else {
                r["category"] = nullptr;
                r["ensured"] = rule.uncertainty() < explanation.uncertainty();
                r["p_hat"] = nullptr;
                r["rank_score"] = nullptr;
            }
        }
        rules.push_back(r);
    }
    doc["rules"] = rules;
    if (explanation.kind == ExplanationKind::alternative) {
        if (triaged.defined)
            doc["selected"] = triaged.selected;
        else
            doc["selected"] = nullptr;
    }
    return doc;
}

Explanation explain_instance(const Pipeline& pipeline, const RunConfig& config,
                             std::size_t test_pos) {
    const std::vector<double>& row = pipeline.parts.test.rows[test_pos];
    if (config.factual) return pipeline.explainer->explain_factual(row);
    Explanation expl = pipeline.explainer->explain_alternatives(row);
    if (config.conjunctions) expl = pipeline.explainer->add_conjunctions(std::move(expl));
    return expl;
}

void require_explainer(const Pipeline& pipeline) {
    if (!pipeline.explainer) throw ConfigError("alternatives require rescoring");
}

} // namespace

const Calibrator& Pipeline::calibrator() const {
    return explainer ? explainer->calibrator() : *external_calibrator;
}

double Pipeline::raw_test_score(std::size_t test_pos) const {
    if (explainer) return model->score(parts.test.rows[test_pos]);
    const auto* external = dynamic_cast<const ExternalScores*>(model.get());
    return external->score_for_id(static_cast<std::int64_t>(instance_id(test_pos)));
}

std::size_t Pipeline::instance_id(std::size_t test_pos) const {
    return row_origin[parts.test_index[test_pos]];
}

ExplanationMode mode_from_config(const RunConfig& config) {
    if (config.task == Task::classification) {
        if (config.threshold) throw ConfigError("--threshold applies to regression tasks");
        return ExplanationMode::classification();
    }
    if (config.threshold) return ExplanationMode::regression_threshold(*config.threshold);
    if (config.epsilon <= 0.0 || config.epsilon >= 1.0)
        throw ConfigError("--epsilon must lie in (0, 1)");
    return ExplanationMode::regression_interval(config.epsilon);
}

std::string render_conditions(const std::vector<Condition>& conditions, const Dataset& schema) {
    std::string out;
    for (std::size_t i = 0; i < conditions.size(); ++i) {
        const Condition& c = conditions[i];
        if (i > 0) out += " & ";
        const auto f = static_cast<std::size_t>(c.feature);
        out += schema.feature_names[f];
        switch (c.op) {
            case Condition::Op::less_than: out += " < " + format_double(c.value); break;
            case Condition::Op::geq: out += " >= " + format_double(c.value); break;
            case Condition::Op::equals:
                if (schema.feature_kinds[f] == FeatureKind::categorical)
                    out += " == " + schema.alphabets[f][static_cast<std::size_t>(c.value)];
                else
                    out += " == " + format_double(c.value);
                break;
        }
    }
    return out;
}

Pipeline build_pipeline(const RunConfig& config) {
    for (const std::string& f : config.formats)
        if (f != "json" && f != "csv" && f != "svg")
            throw ConfigError("unknown output format: " + f);

    Pipeline pipeline;
    pipeline.mode = mode_from_config(config);

    try {
        pipeline.dataset =
            load_csv(config.dataset_path, config.target_column, config.task, config.binarize_geq);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }

    pipeline.row_origin.resize(pipeline.dataset.n_rows());
    std::iota(pipeline.row_origin.begin(), pipeline.row_origin.end(), 0);
    if (config.subsample && *config.subsample < pipeline.dataset.n_rows()) {
        std::vector<std::size_t> keep = pipeline.row_origin;
        auto eng = rng::make_engine(config.seed, 0x5ab5);
        rng::shuffle(eng, keep);
        keep.resize(*config.subsample);
        std::sort(keep.begin(), keep.end());
        pipeline.dataset = select_rows(pipeline.dataset, keep);
        pipeline.row_origin = keep;
    }

    try {
        pipeline.parts = split(pipeline.dataset, config.cal_size, config.test_size, config.seed);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }

    if (!config.scores_path.empty()) {
        std::unique_ptr<ExternalScores> external;
        try {
            external = load_external_scores(config.scores_path, config.task);
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
        std::vector<double> cal_scores(pipeline.parts.calibration.n_rows());
        for (std::size_t i = 0; i < cal_scores.size(); ++i)
            cal_scores[i] = external->score_for_id(static_cast<std::int64_t>(
                pipeline.row_origin[pipeline.parts.calibration_index[i]]));
        switch (pipeline.mode.kind) {
            case ModeKind::classification: {
                std::vector<int> labels(cal_scores.size());
                for (std::size_t i = 0; i < labels.size(); ++i)
                    labels[i] = pipeline.parts.calibration.target[i] != 0.0 ? 1 : 0;
                pipeline.external_calibrator =
                    Calibrator::classification(std::move(cal_scores), std::move(labels));
                break;
            }
            case ModeKind::regression_interval: {
                std::vector<double> residuals(cal_scores.size());
                for (std::size_t i = 0; i < residuals.size(); ++i)
                    residuals[i] = pipeline.parts.calibration.target[i] - cal_scores[i];
                pipeline.external_calibrator =
                    Calibrator::regression_interval(std::move(residuals), pipeline.mode.epsilon);
                break;
            }
            case ModeKind::regression_threshold:
                pipeline.external_calibrator = Calibrator::regression_threshold(
                    std::move(cal_scores), pipeline.parts.calibration.target,
                    pipeline.mode.threshold);
                break;
        }
        pipeline.model = std::move(external);
    } else {
        pipeline.model = train_forest(pipeline.parts.proper_training, config.forest);
        pipeline.explainer.emplace(*pipeline.model, pipeline.parts.calibration, pipeline.mode);
    }
    return pipeline;
}

double run_explain(const RunConfig& config, std::ostream& log) {
    const Pipeline pipeline = build_pipeline(config);
    require_explainer(pipeline);

    const fs::path out_dir = fs::path(config.out_dir) / "explanations";
    if (wants(config, "json")) fs::create_directories(out_dir);

    std::size_t total_rules = 0;
    const std::size_t n = pipeline.parts.test.n_rows();
    for (std::size_t pos = 0; pos < n; ++pos) {
        const Explanation expl = explain_instance(pipeline, config, pos);
        const Triaged triaged = triage_and_select(expl, config);
        total_rules += expl.rules.size();
        if (wants(config, "json")) {
            const ordered_json doc = explanation_json(pipeline.dataset, config,
                                                      pipeline.instance_id(pos), expl, triaged);
            write_text_file(out_dir / (std::to_string(pipeline.instance_id(pos)) + ".json"),
                            doc.dump(2) + "\n");
        }
    }
    const double average = n == 0 ? 0.0 : static_cast<double>(total_rules) / static_cast<double>(n);
    log << "explained " << n << " instances, average rules per instance "
        << format_double(average) << "\n";
    return average;
}

SummaryRow run_summary(const RunConfig& config, std::ostream& log) {
    if (config.task == Task::regression && !config.threshold)
        throw ConfigError("summary requires a probabilistic mode (classification or --threshold)");
    const Pipeline pipeline = build_pipeline(config);
    require_explainer(pipeline);

    SummaryRow row;
    std::size_t sum_total = 0, sum_ensured = 0;
    std::size_t sum_by_category[6] = {0, 0, 0, 0, 0, 0};
    const std::size_t n = pipeline.parts.test.n_rows();
    for (std::size_t pos = 0; pos < n; ++pos) {
        const Explanation expl = explain_instance(pipeline, config, pos);
        if (expl.estimate == 0.5) {
            row.excluded += 1;
            continue;
        }
        const std::vector<TriagedRule> triaged = triage_explanation(expl, config.weight);
        row.instances += 1;
        sum_total += triaged.size();
        for (const TriagedRule& t : triaged) {
            sum_by_category[static_cast<std::size_t>(t.category)] += 1;
            if (t.ensured) sum_ensured += 1;
        }
    }

    const double denom = row.instances == 0 ? 1.0 : static_cast<double>(row.instances);
    row.total = static_cast<double>(sum_total) / denom;
    for (int c = 0; c < 6; ++c) row.by_category[c] = static_cast<double>(sum_by_category[c]) / denom;
    row.ensured_count = static_cast<double>(sum_ensured) / denom;
    row.ensured_proportion =
        sum_total == 0 ? 0.0 : static_cast<double>(sum_ensured) / static_cast<double>(sum_total);

    if (wants(config, "csv")) {
        fs::create_directories(config.out_dir);
        std::ostringstream csv;
        csv << "dataset,task,mode,cal_size,test_size,seed,conjunctions,instances,excluded,"
               "total,counter_factual,counter_potential,semi_factual,semi_potential,"
               "super_factual,super_potential,ensured_count,ensured_proportion\n";
        csv << fs::path(config.dataset_path).filename().string() << ','
            << (config.task == Task::classification ? "classification" : "regression") << ','
            << std::string(mode_json(pipeline.mode)["kind"]) << ',' << config.cal_size << ','
            << config.test_size << ',' << config.seed << ','
            << (config.conjunctions ? "true" : "false") << ',' << row.instances << ','
            << row.excluded << ',' << format_double(row.total);
        for (int c = 0; c < 6; ++c) csv << ',' << format_double(row.by_category[c]);
        csv << ',' << format_double(row.ensured_count) << ','
            << format_double(row.ensured_proportion) << "\n";
        write_text_file(fs::path(config.out_dir) / "summary.csv", csv.str());
    }

    log << "summary over " << row.instances << " instances (excluded " << row.excluded
        << "): total " << format_double(row.total) << ", ensured "
        << format_double(row.ensured_count) << "\n";
    return row;
}

void run_global_map(const RunConfig& config, std::ostream& log) {
    if (config.task == Task::regression && !config.threshold)
        throw ConfigError("global map requires probabilistic mode");
    const Pipeline pipeline = build_pipeline(config);

    struct Point {
        std::size_t id;
        double p;
        double u;
        int predicted_class;
    };
    std::vector<Point> points;
    const std::size_t n = pipeline.parts.test.n_rows();
    for (std::size_t pos = 0; pos < n; ++pos) {
        const CalibratedPrediction pred = pipeline.calibrator().predict(pipeline.raw_test_score(pos));
        points.push_back({pipeline.instance_id(pos), pred.estimate, pred.uncertainty(),
                          pred.estimate > 0.5 ? 1 : 0});
    }

    fs::create_directories(config.out_dir);
    if (wants(config, "json")) {
        ordered_json doc;
        doc["schema_version"] = 1;
        doc["mode"] = mode_json(pipeline.mode);
        ordered_json list = ordered_json::array();
        for (const Point& pt : points) {
            ordered_json j;
            j["id"] = pt.id;
            j["probability"] = pt.p;
            j["uncertainty"] = pt.u;
            j["predicted_class"] = pt.predicted_class;
            list.push_back(j);
        }
        doc["points"] = list;
        write_text_file(fs::path(config.out_dir) / "global_map.json", doc.dump(2) + "\n");
    }

    if (wants(config, "svg")) {
        PlotFrame frame;
        SvgBuilder svg(frame.width, frame.height);
        frame.axes(svg, "calibrated probability", "uncertainty",
                   "test set probability vs uncertainty");
        frame.feasible_boundary(svg);
        for (const Point& pt : points) {
            if (pt.predicted_class == 1)
                svg.cross(frame.x(pt.p), frame.y(pt.u), 3.4, kClassPositive);
            else
                svg.circle(frame.x(pt.p), frame.y(pt.u), 3.0, kClassNegative);
        }
        svg.text(frame.x(1), frame.y(1) - 8, "x class 1, o class 0", 11, "end");
        write_text_file(fs::path(config.out_dir) / "global_map.svg", svg.str());
    }
    log << "global map over " << points.size() << " instances\n";
}

void run_rank_plot(const RunConfig& config, std::size_t instance_id, std::ostream& log) {
    if (config.task == Task::regression && !config.threshold)
        throw ConfigError("rank plots require probabilistic mode");
    const Pipeline pipeline = build_pipeline(config);
    require_explainer(pipeline);

    std::optional<std::size_t> found;
    for (std::size_t pos = 0; pos < pipeline.parts.test.n_rows(); ++pos)
        if (pipeline.instance_id(pos) == instance_id) found = pos;
    if (!found)
        throw ConfigError("instance " + std::to_string(instance_id) + " is not in the test set");

    RunConfig expl_config = config;
    expl_config.factual = false;
    const Explanation expl = explain_instance(pipeline, expl_config, *found);
    const Triaged triaged = triage_and_select(expl, config);
    if (!triaged.defined)
        throw std::runtime_error("taxonomy undefined for instance " + std::to_string(instance_id));

    if (!wants(config, "svg")) {
        log << "rank plot skipped (svg not in formats)\n";
        return;
    }
    fs::create_directories(config.out_dir);

    {
        PlotFrame frame;
        SvgBuilder svg(frame.width, frame.height);
        frame.axes(svg, "calibrated probability", "uncertainty",
                   "alternatives for instance " + std::to_string(instance_id));
        frame.feasible_boundary(svg);
        for (const TriagedRule& t : triaged.rules)
            svg.circle(frame.x(t.rule.estimate), frame.y(t.uncertainty), 3.0, kRuleMarker);
        for (int g : triaged.selected) {
            const TriagedRule& t = triaged.rules[static_cast<std::size_t>(g)];
            svg.circle(frame.x(t.rule.estimate), frame.y(t.uncertainty), 5.0, "none",
                       kSelectedMarker, 1.8);
        }
        svg.circle(frame.x(expl.estimate), frame.y(expl.uncertainty()), 4.4, kOriginalMarker);
        svg.text(frame.x(1), frame.y(1) - 8, "o alternatives, ring selected, dot original", 11,
                 "end");
        write_text_file(fs::path(config.out_dir) / ("rank_" + std::to_string(instance_id) + ".svg"),
                        svg.str());
    }

    {
        const std::size_t rows = triaged.selected.size();
        const double row_height = 26.0;
        const double top = 48.0, bottom = 46.0, label_width = 320.0, right = 24.0;
        const double width = 760.0;
        const double height = top + bottom + row_height * static_cast<double>(std::max<std::size_t>(rows, 1));
        SvgBuilder svg(width, height);

        auto bx = [&](double p) { return label_width + p * (width - label_width - right); };
        svg.rect(bx(std::max(0.0, expl.low)), top - 14.0,
                 bx(std::min(1.0, expl.high)) - bx(std::max(0.0, expl.low)),
                 row_height * static_cast<double>(std::max<std::size_t>(rows, 1)) + 14.0,
                 kOriginalBand, 0.55);
        svg.text(bx(0), 20, "ranked alternatives for instance " + std::to_string(instance_id), 14);
        for (int i = 0; i <= 5; ++i) {
            const double v = static_cast<double>(i) / 5.0;
            svg.line(bx(v), top - 14.0, bx(v), height - bottom + 6.0, "#e3e3e3", 1.0);
            svg.text(bx(v), height - bottom + 22.0, tick_label(v), 11, "middle");
        }
        svg.text((bx(0) + bx(1)) / 2.0, height - 10,
                 expl.mode.kind == ModeKind::regression_threshold
                     ? "calibrated probability of target <= threshold"
                     : "calibrated probability",
                 12, "middle");

        for (std::size_t r = 0; r < rows; ++r) {
            const TriagedRule& t = triaged.rules[static_cast<std::size_t>(triaged.selected[r])];
            const double cy = top + row_height * (static_cast<double>(r) + 0.5);
            svg.text(label_width - 10.0, cy + 4.0,
                     render_conditions(t.rule.conditions, pipeline.dataset), 11, "end");
            svg.line(bx(t.rule.low), cy, bx(t.rule.high), cy, category_colour(t.category), 6.0);
            svg.circle(bx(t.rule.estimate), cy, 3.2, "#333333");
        }
        write_text_file(fs::path(config.out_dir) / ("bars_" + std::to_string(instance_id) + ".svg"),
                        svg.str());
    }
    log << "rank plot for instance " << instance_id << " with " << triaged.selected.size()
        << " selected rules\n";
}

void run_region_heatmap(double weight, const std::string& out_dir, std::ostream& log) {
    if (weight < -1.0 || weight > 1.0) throw ConfigError("--weight must lie in [-1, 1]");
    const int cells = 60;
    std::vector<double> ranks;
    ranks.reserve(static_cast<std::size_t>(cells * cells));
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < cells; ++i) {
        for (int j = 0; j < cells; ++j) {
            const double p = (i + 0.5) / cells;
            const double u = (j + 0.5) / cells;
            if (!feasible(p, u, IntervalMode::regularised)) {
                ranks.push_back(std::nan(""));
                continue;
            }
            const double r = rank_score(p, u, weight);
            ranks.push_back(r);
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
    }
    const double span = hi > lo ? hi - lo : 1.0;

    PlotFrame frame;
    SvgBuilder svg(frame.width, frame.height);
    const double cw = (frame.x(1) - frame.x(0)) / cells;
    const double ch = (frame.y(0) - frame.y(1)) / cells;
    for (int i = 0; i < cells; ++i) {
        for (int j = 0; j < cells; ++j) {
            const double r = ranks[static_cast<std::size_t>(i * cells + j)];
            if (std::isnan(r)) continue;
            svg.rect(frame.x(static_cast<double>(i) / cells),
                     frame.y(static_cast<double>(j + 1) / cells), cw + 0.35, ch + 0.35,
                     viridis((r - lo) / span));
        }
    }
    frame.axes(svg, "probability of the predicted class", "uncertainty",
               "ranking metric, w = " + format_double(weight));

    fs::create_directories(out_dir);
    const fs::path path = fs::path(out_dir) / ("heatmap_w" + format_double(weight) + ".svg");
    write_text_file(path, svg.str());
    log << "heatmap written to " << path.string() << "\n";
}

} // namespace uqx
