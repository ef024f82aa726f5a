#include "fairboost/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace fairboost {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        if (!cell.empty() && cell.back() == '\r') cell.pop_back();
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

GroupCounts recount(const std::vector<Example>& examples) {
    GroupCounts c;
    for (const auto& e : examples) {
        c.n[e.protected_group]++;
        if (e.label > 0)
            c.pos[e.protected_group]++;
        else
            c.neg[e.protected_group]++;
    }
    return c;
}

}  // namespace

SchemaConfig SchemaConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open schema config: " + path);
    nlohmann::json j;
    in >> j;
    SchemaConfig cfg;
    cfg.label_column = j.at("label_column").get<std::string>();
    cfg.positive_value = j.at("positive_value").get<std::string>();
    cfg.protected_column = j.at("protected_column").get<std::string>();
    cfg.group1_value = j.at("group1_value").get<std::string>();
    if (j.contains("categorical_columns"))
        cfg.categorical_columns = j["categorical_columns"].get<std::vector<std::string>>();
    if (j.contains("drop_columns"))
        cfg.drop_columns = j["drop_columns"].get<std::vector<std::string>>();
    return cfg;
}

Dataset::Dataset(std::vector<Example> examples, Schema schema)
    : examples_(std::move(examples)), schema_(std::move(schema)) {
    if (examples_.empty()) throw std::invalid_argument("dataset has zero rows");
    for (std::size_t i = 0; i < examples_.size(); ++i) {
        const auto& e = examples_[i];
        if (e.label != 1 && e.label != -1)
            throw std::invalid_argument("label must be -1 or +1 at row " + std::to_string(i));
        if (e.protected_group != 0 && e.protected_group != 1)
            throw std::invalid_argument("protected group must be 0 or 1 at row " + std::to_string(i));
        if (e.features.size() != schema_.width())
            throw std::invalid_argument("feature width mismatch at row " + std::to_string(i));
    }
    counts_ = recount(examples_);
}

std::int64_t Dataset::cell_count(int a, int y) const {
    return y > 0 ? counts_.pos[a] : counts_.neg[a];
}

std::optional<std::string> Dataset::decode_categorical(const std::vector<double>& row,
                                                       std::size_t column_index) const {
    std::size_t offset = 0;
    for (std::size_t c = 0; c < schema_.columns.size(); ++c) {
        const auto& col = schema_.columns[c];
        std::size_t block = col.categorical ? col.levels.size() : 1;
        if (c == column_index) {
            if (!col.categorical)
                throw std::invalid_argument("column " + col.name + " is not categorical");
            for (std::size_t l = 0; l < col.levels.size(); ++l)
                if (row.at(offset + l) != 0.0) return col.levels[l];
            return std::nullopt;
        }
        offset += block;
    }
    throw std::out_of_range("column index out of range");
}

Dataset load_csv(const std::string& path, const SchemaConfig& config) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open csv: " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path);
    const std::vector<std::string> header = split_csv_line(line);

    auto column_of = [&](const std::string& name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw std::runtime_error("schema error: column '" + name + "' not found in " + path);
        return static_cast<std::size_t>(it - header.begin());
    };

    const std::size_t label_idx = column_of(config.label_column);
    const std::size_t prot_idx = column_of(config.protected_column);
    for (const auto& c : config.categorical_columns) column_of(c);

    auto is_in = [](const std::vector<std::string>& v, const std::string& s) {
        return std::find(v.begin(), v.end(), s) != v.end();
    };

    // Feature columns: everything except label, protected, and drops.
    struct SourceCol {
        std::size_t idx;
        bool categorical;
    };
    std::vector<SourceCol> feature_cols;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i == label_idx || i == prot_idx) continue;
        if (is_in(config.drop_columns, header[i])) continue;
        feature_cols.push_back({i, is_in(config.categorical_columns, header[i])});
    }

    std::vector<std::vector<std::string>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw std::runtime_error("row " + std::to_string(lineno) + ": expected " +
                                     std::to_string(header.size()) + " cells, got " +
                                     std::to_string(cells.size()));
        rows.push_back(std::move(cells));
    }
    if (rows.empty()) throw std::runtime_error("empty dataset: no data rows in " + path);

    bool positive_seen = false;
    for (const auto& r : rows)
        if (r[label_idx] == config.positive_value) positive_seen = true;
    if (!positive_seen)
        throw std::runtime_error("schema error: positive value '" + config.positive_value +
                                 "' never occurs in column '" + config.label_column + "'");

    // Discover categorical levels in order of first appearance.
    Schema schema;
    for (const auto& fc : feature_cols) {
        ColumnEncoding enc;
        enc.name = header[fc.idx];
        enc.categorical = fc.categorical;
        if (fc.categorical) {
            for (const auto& r : rows)
                if (!is_in(enc.levels, r[fc.idx])) enc.levels.push_back(r[fc.idx]);
            for (const auto& lvl : enc.levels)
                schema.feature_names.push_back(enc.name + "=" + lvl);
        } else {
            schema.feature_names.push_back(enc.name);
        }
        schema.columns.push_back(std::move(enc));
    }

    std::vector<Example> examples;
    examples.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        Example e;
        e.label = rows[r][label_idx] == config.positive_value ? +1 : -1;
        e.protected_group = rows[r][prot_idx] == config.group1_value ? 1 : 0;
        e.features.reserve(schema.width());
        std::size_t col = 0;
        for (const auto& fc : feature_cols) {
            const auto& enc = schema.columns[col++];
            const std::string& cell = rows[r][fc.idx];
            if (enc.categorical) {
                for (const auto& lvl : enc.levels) e.features.push_back(cell == lvl ? 1.0 : 0.0);
            } else {
                try {
                    std::size_t pos = 0;
                    double v = std::stod(cell, &pos);
                    if (pos != cell.size()) throw std::invalid_argument(cell);
                    e.features.push_back(v);
                } catch (const std::exception&) {
                    throw std::runtime_error("row " + std::to_string(r + 2) +
                                             ": cannot parse numeric cell '" + cell +
                                             "' in column '" + enc.name + "'");
                }
            }
        }
        examples.push_back(std::move(e));
    }
    return Dataset(std::move(examples), std::move(schema));
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& d, double test_fraction,
                                             std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw std::invalid_argument("test_fraction must be in (0,1)");
    const std::size_t n = d.size();
    const auto test_n =
        static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
    if (test_n == 0 || test_n == n)
        throw std::invalid_argument("split leaves an empty side (n=" + std::to_string(n) + ")");

    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);

    std::vector<std::size_t> test_idx(idx.begin(), idx.begin() + test_n);
    std::vector<std::size_t> train_idx(idx.begin() + test_n, idx.end());
    // keep original row order within each side
    std::sort(test_idx.begin(), test_idx.end());
    std::sort(train_idx.begin(), train_idx.end());

    auto take = [&](const std::vector<std::size_t>& which) {
        std::vector<Example> ex;
        ex.reserve(which.size());
        for (auto i : which) ex.push_back(d.examples()[i]);
        return Dataset(std::move(ex), d.schema());
    };
    return {take(train_idx), take(test_idx)};
}

Dataset make_synthetic(std::int64_t n, double group_imbalance, double base_rate_gap,
                       double noise, std::uint64_t seed) {
    if (n < 4) throw std::invalid_argument("synthetic dataset needs n >= 4");
    if (group_imbalance < 0.0 || group_imbalance > 1.0 || base_rate_gap < 0.0 ||
        base_rate_gap > 1.0)
        throw std::invalid_argument("rates must lie in [0,1]");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const double rate1 = std::min(1.0, 0.5 + base_rate_gap / 2.0);
    const double rate0 = std::max(0.0, 0.5 - base_rate_gap / 2.0);

    Schema schema;
    schema.columns = {{"x1", false, {}}, {"x2", false, {}}};
    schema.feature_names = {"x1", "x2"};

    std::vector<Example> examples;
    examples.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        Example e;
        e.protected_group = unif(rng) < group_imbalance ? 1 : 0;
        const double rate = e.protected_group == 1 ? rate1 : rate0;
        e.label = unif(rng) < rate ? +1 : -1;
        // the low-base-rate group's feature signal weakens with the gap and
        // inverts for large gaps, so a single threshold that serves group 1
        // systematically misses group 0 positives
        const double scale =
            e.protected_group == 1 ? 1.0 : std::clamp(1.0 - 2.5 * base_rate_gap, -0.6, 1.0);
        e.features = {static_cast<double>(e.label) * scale + noise * gauss(rng),
                      0.5 * static_cast<double>(e.label) * scale + noise * gauss(rng)};
        examples.push_back(std::move(e));
    }
    return Dataset(std::move(examples), std::move(schema));
}

}  // namespace fairboost
