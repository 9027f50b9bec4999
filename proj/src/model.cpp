#include "uqx/model.hpp"

#include "uqx/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace uqx {

namespace {

struct TreeBuilder {
    const Dataset& data;
    const ForestParams& params;
    Task task;
    int max_features;
    std::vector<RandomForest::Node> nodes;
    std::mt19937_64 eng;

    TreeBuilder(const Dataset& d, const ForestParams& p, Task t, int mf, std::mt19937_64 e)
        : data(d), params(p), task(t), max_features(mf), eng(e) {}

    double leaf_value(const std::vector<std::size_t>& idx) const {
        double sum = 0.0;
        for (std::size_t i : idx) sum += data.target[i];
        const double mean = sum / static_cast<double>(idx.size());
        if (task == Task::classification) return mean >= 0.5 ? 1.0 : 0.0;
        return mean;
    }

    // Gini impurity times count for classification, SSE for regression;
    // both as (count, sum, sum of squares) so split scan stays incremental.
    static double impurity(Task task, double n, double sum, double sum_sq) {
        if (n <= 0.0) return 0.0;
        if (task == Task::classification) {
            const double p = sum / n;
            return 2.0 * n * p * (1.0 - p);
        }
        return sum_sq - sum * sum / n;
    }

    struct Split {
        int feature = -1;
        double threshold = 0.0;
        bool categorical = false;
        double score = 0.0; // impurity decrease; larger is better
    };

    Split best_split(const std::vector<std::size_t>& idx) {
        Split best;
        const std::size_t min_leaf = static_cast<std::size_t>(params.min_samples_leaf);

        std::vector<int> features(data.n_features());
        std::iota(features.begin(), features.end(), 0);
        for (int k = 0; k < max_features && static_cast<std::size_t>(k) < features.size(); ++k) {
            const std::size_t j =
                k + static_cast<std::size_t>(rng::below(eng, features.size() - static_cast<std::size_t>(k)));
            std::swap(features[static_cast<std::size_t>(k)], features[j]);
        }

        const double n = static_cast<double>(idx.size());
        double total_sum = 0.0, total_sq = 0.0;
        for (std::size_t i : idx) {
            total_sum += data.target[i];
            total_sq += data.target[i] * data.target[i];
        }
        const double parent = impurity(task, n, total_sum, total_sq);

        std::vector<std::pair<double, double>> vals(idx.size()); // (feature value, target)
        for (int k = 0; k < max_features && static_cast<std::size_t>(k) < features.size(); ++k) {
            const int f = features[static_cast<std::size_t>(k)];
            for (std::size_t r = 0; r < idx.size(); ++r)
                vals[r] = {data.rows[idx[r]][static_cast<std::size_t>(f)], data.target[idx[r]]};

            if (data.feature_kinds[static_cast<std::size_t>(f)] == FeatureKind::categorical) {
                // One-vs-rest split per observed category.
                std::map<double, std::pair<double, double>> per_cat; // count, sum
                std::map<double, double> per_cat_sq;
                for (const auto& [v, y] : vals) {
                    per_cat[v].first += 1.0;
                    per_cat[v].second += y;
                    per_cat_sq[v] += y * y;
                }
                for (const auto& [cat, cs] : per_cat) {
                    const double nl = cs.first;
                    const double nr = n - nl;
                    if (nl < static_cast<double>(min_leaf) || nr < static_cast<double>(min_leaf))
                        continue;
                    const double left = impurity(task, nl, cs.second, per_cat_sq[cat]);
                    const double right =
                        impurity(task, nr, total_sum - cs.second, total_sq - per_cat_sq[cat]);
                    const double gain = parent - left - right;
                    if (gain > best.score + 1e-12) {
                        best = {f, cat, true, gain};
                    }
                }
            } else {
                std::sort(vals.begin(), vals.end());
                double left_n = 0.0, left_sum = 0.0, left_sq = 0.0;
                for (std::size_t r = 0; r + 1 < vals.size(); ++r) {
                    left_n += 1.0;
                    left_sum += vals[r].second;
                    left_sq += vals[r].second * vals[r].second;
                    if (vals[r].first == vals[r + 1].first) continue;
                    if (left_n < static_cast<double>(min_leaf) ||
                        n - left_n < static_cast<double>(min_leaf))
                        continue;
                    const double thr = vals[r].first + (vals[r + 1].first - vals[r].first) / 2.0;
                    const double left = impurity(task, left_n, left_sum, left_sq);
                    const double right =
                        impurity(task, n - left_n, total_sum - left_sum, total_sq - left_sq);
                    const double gain = parent - left - right;
                    if (gain > best.score + 1e-12) {
                        best = {f, thr, false, gain};
                    }
                }
            }
        }
        return best;
    }

    int build(std::vector<std::size_t>& idx, int depth) {
        const int node_id = static_cast<int>(nodes.size());
        nodes.push_back({});

        bool pure = true;
        for (std::size_t i : idx)
            if (data.target[i] != data.target[idx[0]]) {
                pure = false;
                break;
            }
        const bool depth_capped = params.max_depth && depth >= *params.max_depth;
        if (pure || depth_capped ||
            idx.size() < 2 * static_cast<std::size_t>(params.min_samples_leaf)) {
            nodes[static_cast<std::size_t>(node_id)].value = leaf_value(idx);
            return node_id;
        }

        const Split split = best_split(idx);
        if (split.feature < 0) {
            nodes[static_cast<std::size_t>(node_id)].value = leaf_value(idx);
            return node_id;
        }

        std::vector<std::size_t> left_idx, right_idx;
        left_idx.reserve(idx.size());
        right_idx.reserve(idx.size());
        for (std::size_t i : idx) {
            const double v = data.rows[i][static_cast<std::size_t>(split.feature)];
            const bool goes_left = split.categorical ? v == split.threshold : v < split.threshold;
            (goes_left ? left_idx : right_idx).push_back(i);
        }
        idx.clear();
        idx.shrink_to_fit();

        const int left = build(left_idx, depth + 1);
        const int right = build(right_idx, depth + 1);
        RandomForest::Node& node = nodes[static_cast<std::size_t>(node_id)];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.categorical = split.categorical;
        node.left = left;
        node.right = right;
        return node_id;
    }
};

double predict_tree(const std::vector<RandomForest::Node>& tree, std::span<const double> x) {
    int cur = 0;
    while (tree[static_cast<std::size_t>(cur)].feature >= 0) {
        const RandomForest::Node& node = tree[static_cast<std::size_t>(cur)];
        const double v = x[static_cast<std::size_t>(node.feature)];
        const bool left = node.categorical ? v == node.threshold : v < node.threshold;
        cur = left ? node.left : node.right;
    }
    return tree[static_cast<std::size_t>(cur)].value;
}

} // namespace

double RandomForest::score(std::span<const double> instance) const {
    if (instance.size() != n_features_)
        throw std::invalid_argument("instance arity does not match model");
    double sum = 0.0;
    for (const auto& tree : trees_) sum += predict_tree(tree, instance);
    return sum / static_cast<double>(trees_.size());
}

std::unique_ptr<RandomForest> train_forest(const Dataset& training_set, const ForestParams& params) {
    if (training_set.n_rows() == 0) throw std::invalid_argument("empty training set");
    if (params.n_trees < 1) throw std::invalid_argument("n_trees must be positive");
    if (params.min_samples_leaf < 1) throw std::invalid_argument("min_samples_leaf must be positive");
    if (training_set.task == Task::classification) {
        for (double y : training_set.target)
            if (y != 0.0 && y != 1.0)
                throw std::invalid_argument("classification targets must be binary");
    }

    const std::size_t n_features = training_set.n_features();
    int max_features;
    if (params.max_features) {
        max_features = std::clamp(*params.max_features, 1, static_cast<int>(n_features));
    } else if (training_set.task == Task::classification) {
        max_features = std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(n_features)))));
    } else {
        max_features = std::max(1, static_cast<int>(std::ceil(static_cast<double>(n_features) / 3.0)));
    }

    auto forest = std::unique_ptr<RandomForest>(new RandomForest());
    forest->task_ = training_set.task;
    forest->n_features_ = n_features;
    forest->feature_kinds_ = training_set.feature_kinds;
    forest->trees_.reserve(static_cast<std::size_t>(params.n_trees));

    const std::size_t n = training_set.n_rows();
    for (int t = 0; t < params.n_trees; ++t) {
        auto eng = rng::make_engine(params.rng_seed, 0xf0e5 + static_cast<std::uint64_t>(t));
        std::vector<std::size_t> idx;
        idx.reserve(n);
        if (params.bootstrap) {
            for (std::size_t i = 0; i < n; ++i) idx.push_back(static_cast<std::size_t>(rng::below(eng, n)));
        } else {
            for (std::size_t i = 0; i < n; ++i) idx.push_back(i);
        }
        TreeBuilder builder(training_set, params, training_set.task, max_features, std::move(eng));
        builder.build(idx, 0);
        forest->trees_.push_back(std::move(builder.nodes));
    }
    return forest;
}

ExternalScores::ExternalScores(std::map<std::int64_t, double> table, Task task)
    : table_(std::move(table)), task_(task) {
    if (table_.empty()) throw std::invalid_argument("no scores");
}

double ExternalScores::score(std::span<const double>) const {
    throw std::runtime_error("external scores cannot rescore feature vectors");
}

double ExternalScores::score_for_id(std::int64_t id) const {
    const auto it = table_.find(id);
    if (it == table_.end())
        throw std::runtime_error("no score for instance " + std::to_string(id));
    return it->second;
}

std::unique_ptr<ExternalScores> load_external_scores(const std::string& path, Task task) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scores: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("no scores in " + path);

    std::map<std::int64_t, double> table;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("malformed score row at line " + std::to_string(line_no));
        std::int64_t id = 0;
        double score = 0.0;
        const char* id_end = line.data() + comma;
        auto idr = std::from_chars(line.data(), id_end, id);
        std::string score_text = line.substr(comma + 1);
        if (!score_text.empty() && score_text.back() == '\r') score_text.pop_back();
        auto scr = std::from_chars(score_text.data(), score_text.data() + score_text.size(), score);
        if (idr.ec != std::errc() || idr.ptr != id_end || scr.ec != std::errc() ||
            scr.ptr != score_text.data() + score_text.size())
            throw std::runtime_error("malformed score row at line " + std::to_string(line_no));
        if (task == Task::classification && (score < 0.0 || score > 1.0))
            throw std::runtime_error("score out of [0,1] at line " + std::to_string(line_no));
        table[id] = score;
    }
    if (table.empty()) throw std::runtime_error("no scores in " + path);
    return std::make_unique<ExternalScores>(std::move(table), task);
}

} // namespace uqx
