#include "uqx/dataset.hpp"

#include "uqx/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace uqx {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    const char* begin = t.data();
    const char* end = begin + t.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    if (quoted)
        throw std::runtime_error("unterminated quote at line " + std::to_string(line_no));
    fields.push_back(cur);
    return fields;
}

std::string format_double(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        double back = 0.0;
        if (parse_double(buf, back) && back == v) break;
    }
    return buf;
}

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

} // namespace

Dataset select_rows(const Dataset& data, const std::vector<std::size_t>& indices) {
    Dataset out;
    out.feature_names = data.feature_names;
    out.feature_kinds = data.feature_kinds;
    out.alphabets = data.alphabets;
    out.target_name = data.target_name;
    out.task = data.task;
    out.rows.reserve(indices.size());
    out.target.reserve(indices.size());
    for (std::size_t i : indices) {
        out.rows.push_back(data.rows[i]);
        out.target.push_back(data.target[i]);
        if (!data.ground_truth.empty()) out.ground_truth.push_back(data.ground_truth[i]);
    }
    return out;
}

std::vector<double> Dataset::column(std::size_t feature) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(row[feature]);
    return out;
}

Dataset load_csv(const std::string& path, const std::string& target_column, Task task,
                 std::optional<double> binarize_geq) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset: " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty file: " + path);
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

    const std::vector<std::string> header = split_csv_line(line, 1);
    std::size_t target_idx = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        if (trim(header[i]) == target_column) target_idx = i;
    if (target_idx == header.size())
        throw std::runtime_error("target column '" + target_column + "' not found in " + path);

    std::vector<std::vector<std::string>> cells;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string> fields = split_csv_line(line, line_no);
        if (fields.size() != header.size())
            throw std::runtime_error("ragged row at line " + std::to_string(line_no) + " in " +
                                     path);
        for (std::size_t i = 0; i < fields.size(); ++i) {
            fields[i] = trim(fields[i]);
            if (fields[i].empty())
                throw std::runtime_error("missing value at line " + std::to_string(line_no) +
                                         " in " + path);
        }
        cells.push_back(std::move(fields));
    }
    if (cells.empty()) throw std::runtime_error("no data rows in " + path);

    Dataset data;
    data.task = task;
    data.target_name = target_column;
    const std::size_t n_features = header.size() - 1;
    data.feature_names.reserve(n_features);
    std::vector<std::size_t> feature_cols;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i == target_idx) continue;
        data.feature_names.push_back(trim(header[i]));
        feature_cols.push_back(i);
    }

    // Numeric iff every value in the column parses as a number.
    data.feature_kinds.assign(n_features, FeatureKind::numeric);
    data.alphabets.assign(n_features, {});
    for (std::size_t f = 0; f < n_features; ++f) {
        double tmp = 0.0;
        for (const auto& row : cells) {
            if (!parse_double(row[feature_cols[f]], tmp)) {
                data.feature_kinds[f] = FeatureKind::categorical;
                break;
            }
        }
        if (data.feature_kinds[f] == FeatureKind::categorical) {
            std::set<std::string> alphabet;
            for (const auto& row : cells) alphabet.insert(row[feature_cols[f]]);
            data.alphabets[f].assign(alphabet.begin(), alphabet.end());
        }
    }

    data.rows.reserve(cells.size());
    data.target.reserve(cells.size());
    for (std::size_t r = 0; r < cells.size(); ++r) {
        const std::size_t file_line = r + 2;
        std::vector<double> row(n_features);
        for (std::size_t f = 0; f < n_features; ++f) {
            const std::string& cell = cells[r][feature_cols[f]];
            if (data.feature_kinds[f] == FeatureKind::numeric) {
                if (!parse_double(cell, row[f]))
                    throw std::runtime_error("unparseable numeric at line " +
                                             std::to_string(file_line) + " in " + path);
            } else {
                const auto& alphabet = data.alphabets[f];
                const auto it = std::lower_bound(alphabet.begin(), alphabet.end(), cell);
                row[f] = static_cast<double>(it - alphabet.begin());
            }
        }
        double y = 0.0;
        if (!parse_double(cells[r][target_idx], y))
            throw std::runtime_error("unparseable target at line " + std::to_string(file_line) +
                                     " in " + path);
        if (task == Task::classification) {
            if (binarize_geq) {
                y = y >= *binarize_geq ? 1.0 : 0.0;
            } else if (y != 0.0 && y != 1.0) {
                throw std::runtime_error("non-binary classification target at line " +
                                         std::to_string(file_line) +
                                         " (use a binarisation threshold)");
            }
        }
        data.rows.push_back(std::move(row));
        data.target.push_back(y);
    }
    return data;
}

void write_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write dataset: " + path);

    auto quote = [](const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += "\"\"";
            else q.push_back(c);
        }
        return q + "\"";
    };

    for (const auto& name : data.feature_names) out << quote(name) << ',';
    out << quote(data.target_name) << '\n';
    for (std::size_t r = 0; r < data.n_rows(); ++r) {
        for (std::size_t f = 0; f < data.n_features(); ++f) {
            if (data.feature_kinds[f] == FeatureKind::categorical)
                out << quote(data.alphabets[f][static_cast<std::size_t>(data.rows[r][f])]);
            else
                out << format_double(data.rows[r][f]);
            out << ',';
        }
        out << format_double(data.target[r]) << '\n';
    }
}

DataSplit split(const Dataset& data, std::size_t cal_size, std::size_t test_size,
                std::uint64_t seed) {
    if (cal_size + test_size >= data.n_rows())
        throw std::invalid_argument("calibration + test sizes exceed dataset");
    std::vector<std::size_t> perm(data.n_rows());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    auto eng = rng::make_engine(seed, 0x5b11);
    rng::shuffle(eng, perm);

    DataSplit out;
    out.seed = seed;
    out.test_index.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(test_size));
    out.calibration_index.assign(perm.begin() + static_cast<std::ptrdiff_t>(test_size),
                                 perm.begin() + static_cast<std::ptrdiff_t>(test_size + cal_size));
    out.training_index.assign(perm.begin() + static_cast<std::ptrdiff_t>(test_size + cal_size),
                              perm.end());
    out.test = select_rows(data, out.test_index);
    out.calibration = select_rows(data, out.calibration_index);
    out.proper_training = select_rows(data, out.training_index);
    return out;
}

Dataset synth_classification(std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("n must be positive");
    Dataset data;
    data.task = Task::classification;
    data.feature_names = {"x1", "x2"};
    data.feature_kinds = {FeatureKind::numeric, FeatureKind::numeric};
    data.alphabets = {{}, {}};
    auto eng = rng::make_engine(seed, 0xc1a55);
    data.rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x1 = rng::uniform01(eng);
        const double x2 = rng::uniform01(eng);
        data.rows.push_back({x1, x2});
        data.target.push_back(rng::bernoulli(eng, x1) ? 1.0 : 0.0);
        data.ground_truth.push_back(x1);
    }
    return data;
}

Dataset synth_regression(std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("n must be positive");
    Dataset data;
    data.task = Task::regression;
    data.feature_names = {"x1", "x2"};
    data.feature_kinds = {FeatureKind::numeric, FeatureKind::numeric};
    data.alphabets = {{}, {}};
    auto eng = rng::make_engine(seed, 0x4e64);
    data.rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x1 = rng::uniform01(eng);
        const double x2 = rng::uniform01(eng);
        const double signal = 10.0 * x1;
        data.rows.push_back({x1, x2});
        data.target.push_back(signal + rng::normal(eng));
        data.ground_truth.push_back(signal);
    }
    return data;
}

Dataset demo_quality(std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("n must be positive");
    Dataset data;
    data.task = Task::classification;
    data.target_name = "quality";
    data.feature_names = {"fixed_acidity",       "volatile_acidity", "citric_acid",
                          "residual_sugar",      "chlorides",        "free_sulfur_dioxide",
                          "total_sulfur_dioxide", "density",          "ph",
                          "sulphates",           "alcohol"};
    data.feature_kinds.assign(11, FeatureKind::numeric);
    data.alphabets.assign(11, {});
    auto eng = rng::make_engine(seed, 0x91ae);
    data.rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double alcohol = rng::uniform(eng, 8.0, 14.2);
        const double volatile_acidity = clamp(0.28 * std::exp(0.35 * rng::normal(eng)), 0.08, 1.1);
        const double chlorides = clamp(0.045 * std::exp(0.4 * rng::normal(eng)), 0.009, 0.35);
        const double residual_sugar = std::exp(rng::uniform(eng, -0.51, 3.0));
        const double density = 1.0017 - 0.00086 * alcohol + 0.00035 * std::log(residual_sugar + 1.0)
                               + 0.0003 * rng::normal(eng);
        const double ph = clamp(3.19 + 0.15 * rng::normal(eng), 2.7, 3.8);
        const double sulphates = clamp(0.49 + 0.11 * rng::normal(eng), 0.22, 1.1);
        const double citric_acid = clamp(0.33 + 0.12 * rng::normal(eng), 0.0, 1.2);
        const double fixed_acidity = clamp(6.85 + 0.85 * rng::normal(eng), 3.8, 11.0);
        const double free_sulfur = clamp(35.0 + 15.0 * rng::normal(eng), 2.0, 150.0);
        const double total_sulfur = clamp(free_sulfur + 100.0 + 35.0 * rng::normal(eng),
                                          free_sulfur, 360.0);

        const double z = 1.1 * (alcohol - 10.5) / 1.2 - 0.9 * (volatile_acidity - 0.28) / 0.10
                         - 0.7 * (chlorides - 0.045) / 0.02 - 0.4 * (density - 0.994) / 0.003
                         + 0.3 * (sulphates - 0.49) / 0.11 + 0.2 * (free_sulfur - 35.0) / 15.0
                         + 1.2 * rng::normal(eng);
        double quality = 6.0;
        if (z < -3.2) quality = 3.0;
        else if (z < -1.9) quality = 4.0;
        else if (z < -0.35) quality = 5.0;
        else if (z < 0.9) quality = 6.0;
        else if (z < 2.3) quality = 7.0;
        else if (z < 3.4) quality = 8.0;
        else quality = 9.0;

        data.rows.push_back({fixed_acidity, volatile_acidity, citric_acid, residual_sugar,
                             chlorides, free_sulfur, total_sulfur, density, ph, sulphates,
                             alcohol});
        data.target.push_back(quality);
    }
    return data;
}

Dataset demo_housing(std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("n must be positive");
    Dataset data;
    data.task = Task::regression;
    data.target_name = "median_house_value";
    data.feature_names = {"longitude", "latitude",   "housing_median_age", "total_rooms",
                          "total_bedrooms", "population", "households",    "median_income",
                          "ocean_proximity"};
    data.feature_kinds.assign(9, FeatureKind::numeric);
    data.feature_kinds[8] = FeatureKind::categorical;
    data.alphabets.assign(9, {});
    data.alphabets[8] = {"<1H OCEAN", "INLAND", "ISLAND", "NEAR BAY", "NEAR OCEAN"};
    auto eng = rng::make_engine(seed, 0x4085e);
    data.rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double lon = rng::uniform(eng, -124.3, -114.3);
        const double lat = rng::uniform(eng, 32.5, 42.0);
        const double age = std::floor(rng::uniform(eng, 1.0, 53.0));
        const double income = clamp(0.5 + 3.4 * std::exp(0.55 * rng::normal(eng)), 0.5, 15.0);
        const double households = std::floor(clamp(420.0 * std::exp(0.6 * rng::normal(eng)), 40.0, 5000.0));
        const double rooms = std::floor(households * clamp(5.2 + 0.35 * income + rng::normal(eng), 2.5, 10.0));
        const double bedrooms = std::floor(clamp(rooms / clamp(4.9 + 0.8 * rng::normal(eng), 3.0, 8.0), 20.0, rooms));
        const double population = std::floor(households * clamp(2.9 + 0.5 * rng::normal(eng), 1.2, 6.0));

        const double d_bay = std::hypot(lon + 122.4, lat - 37.8);
        const double d_south = std::hypot(lon + 118.2, lat - 34.05);
        const double d_coast = std::min(d_bay, d_south);

        std::size_t ocean = 1; // INLAND
        const double coast_noise = rng::normal(eng);
        if (rng::uniform01(eng) < 0.001) ocean = 2;                 // ISLAND
        else if (d_bay + 0.3 * coast_noise < 1.2) ocean = 3;        // NEAR BAY
        else if (d_south + 0.3 * coast_noise < 1.2) ocean = 4;      // NEAR OCEAN
        else if (d_coast + 0.5 * coast_noise < 3.4) ocean = 0;      // <1H OCEAN

        double price = 60.0 + 95.0 * income + 230.0 * std::exp(-d_coast / 2.2) + 1.2 * age
                       + 18.0 * std::log(rooms / households)
                       + (ocean == 1 ? -45.0 : 0.0) + (ocean == 3 || ocean == 4 ? 40.0 : 0.0)
                       + 90.0 * rng::normal(eng);
        price = clamp(price, 80.0, 1400.0);

        data.rows.push_back({lon, lat, age, rooms, bedrooms, population, households, income,
                             static_cast<double>(ocean)});
        data.target.push_back(price);
    }
    return data;
}

} // namespace uqx
