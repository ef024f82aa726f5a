#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairboost/boosting.hpp"
#include "fairboost/dataset.hpp"

namespace fairboost {

struct SyntheticSpec {
    std::int64_t n = 2000;
    double group_imbalance = 0.5;
    double base_rate_gap = 0.4;
    double noise = 0.8;

    /// Parses "n=2000,imbalance=0.5,gap=0.4,noise=0.8" (any subset of keys).
    static SyntheticSpec parse(const std::string& text);
};

struct ExperimentPlan {
    // exactly one source: a CSV path + schema config, or a synthetic spec
    std::string csv_path;
    std::string schema_path;
    std::optional<SyntheticSpec> synthetic;
    std::string dataset_name = "synthetic";

    std::vector<BoostMode> modes;
    std::vector<double> epsilon_grid;  // applies to fairproj cells
    Surrogate surrogate = Surrogate::eopp;
    int rounds = 100;
    std::vector<std::uint64_t> seeds;
    double test_fraction = 0.2;
    std::string out_dir = "out";
    int jobs = 1;
};

struct CellResult {
    BoostMode mode = BoostMode::adaboost;
    double epsilon = 0.0;  // 0 for baseline modes
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;

    double accuracy = 0.0;
    std::optional<double> eopp;
    std::optional<double> dp;
    int rounds_used = 0;
    double mean_delta = 0.0;
    std::string cell_id;
};

struct Aggregate {
    BoostMode mode = BoostMode::adaboost;
    double epsilon = 0.0;
    int cells = 0;
    double accuracy_mean = 0.0, accuracy_std = 0.0;
    std::optional<double> eopp_mean, eopp_std;
    std::optional<double> dp_mean, dp_std;
    double rounds_mean = 0.0;
    double delta_mean = 0.0;
};

struct SweepResult {
    std::vector<CellResult> cells;
    std::vector<Aggregate> aggregates;
    int failed_cells = 0;

    /// 0 all cells succeeded, 1 all failed, 2 partial failures.
    int exit_code() const;
};

/// Executes every (mode, epsilon, seed) cell of the plan over a bounded
/// worker pool, evaluates on the test split, aggregates mean/std, and writes
/// <out>/results.csv, <out>/cells.csv, <out>/pareto.csv,
/// <out>/runs/<cell-id>/curves.csv (+ runlog.json), <out>/manifest.json.
SweepResult run_plan(const ExperimentPlan& plan);

/// Round-diagnostics CSV behind the training-curve plots.
void emit_curves(const RunLog& log, const std::string& path);

/// Tradeoff table (mode, epsilon, accuracy mean/std, gap mean/std) sorted by
/// epsilon descending, with a gap-trend annotation column.
void emit_pareto(const SweepResult& result, const std::string& path);

/// Deterministic double formatting shared by every emitted file.
std::string format_double(double v);

/// "42..51" or "42,43,44" or a single seed.
std::vector<std::uint64_t> parse_seed_spec(const std::string& spec);

}  // namespace fairboost
