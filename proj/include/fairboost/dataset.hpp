#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fairboost {

/// One encoded training example: feature vector, protected group in {0,1},
/// label in {-1,+1}.
struct Example {
    std::vector<double> features;
    int protected_group = 0;
    int label = +1;
};

/// Describes how one source column was encoded.
struct ColumnEncoding {
    std::string name;
    bool categorical = false;
    std::vector<std::string> levels;  // one-hot block, in order of first appearance
};

/// Post-encoding schema: feature layout of the encoded matrix.
struct Schema {
    std::vector<ColumnEncoding> columns;
    std::vector<std::string> feature_names;

    std::size_t width() const { return feature_names.size(); }
};

/// Per-group counts n_a, n_a^+, n_a^-.
struct GroupCounts {
    std::int64_t n[2] = {0, 0};
    std::int64_t pos[2] = {0, 0};
    std::int64_t neg[2] = {0, 0};
};

/// Declarative loading config: which columns mean what.
struct SchemaConfig {
    std::string label_column;
    std::string positive_value;
    std::string protected_column;
    std::string group1_value;
    std::vector<std::string> categorical_columns;
    std::vector<std::string> drop_columns;

    static SchemaConfig from_json_file(const std::string& path);
};

class Dataset {
public:
    Dataset(std::vector<Example> examples, Schema schema);

    const std::vector<Example>& examples() const { return examples_; }
    const Schema& schema() const { return schema_; }
    const GroupCounts& group_counts() const { return counts_; }
    std::size_t size() const { return examples_.size(); }
    std::size_t width() const { return schema_.width(); }

    /// Count of examples in (group a, label y) cell; y is +1 or -1.
    std::int64_t cell_count(int a, int y) const;

    /// Recover the original categorical value of a one-hot block in an
    /// encoded row. Empty optional means the all-zeros (unknown level) block.
    std::optional<std::string> decode_categorical(const std::vector<double>& row,
                                                  std::size_t column_index) const;

private:
    std::vector<Example> examples_;
    Schema schema_;
    GroupCounts counts_;
};

/// Load a CSV (header row, comma-separated, UTF-8) and encode it.
/// Categoricals are one-hot in order of first appearance; numerics pass
/// through unscaled. Labels map to +1 iff cell == positive_value.
Dataset load_csv(const std::string& path, const SchemaConfig& config);

/// Deterministic shuffled split (mt19937_64 seeded shuffle, prefix cut).
/// Returns (train, test).
std::pair<Dataset, Dataset> train_test_split(const Dataset& d, double test_fraction,
                                             std::uint64_t seed);

/// Two-group synthetic generator with controllable group imbalance
/// P(A=1), group-conditional positive-rate gap, and Gaussian feature noise.
/// Features are 2-D with a group-dependent shift on the first coordinate.
Dataset make_synthetic(std::int64_t n, double group_imbalance, double base_rate_gap,
                       double noise, std::uint64_t seed);

}  // namespace fairboost
