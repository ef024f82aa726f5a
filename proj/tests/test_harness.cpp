#include "doctest.h"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fairboost/harness.hpp"

using namespace fairboost;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, sep)) out.push_back(tok);
    return out;
}

ExperimentPlan small_plan(const std::string& out_dir) {
    ExperimentPlan plan;
    SyntheticSpec spec;
    spec.n = 240;
    spec.base_rate_gap = 0.5;
    spec.noise = 0.7;
    plan.synthetic = spec;
    plan.modes = {BoostMode::adaboost, BoostMode::fairproj};
    plan.epsilon_grid = {0.3, 0.1};
    plan.rounds = 6;
    plan.seeds = {42, 43, 44};
    plan.out_dir = out_dir;
    return plan;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::path("/tmp") / name) {
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("synthetic spec parsing") {
    const SyntheticSpec s = SyntheticSpec::parse("n=512,imbalance=0.3,gap=0.6,noise=0.5");
    CHECK(s.n == 512);
    CHECK(s.group_imbalance == 0.3);
    CHECK(s.base_rate_gap == 0.6);
    CHECK(s.noise == 0.5);

    // subsets keep defaults
    const SyntheticSpec partial = SyntheticSpec::parse("gap=0.2");
    CHECK(partial.n == 2000);
    CHECK(partial.base_rate_gap == 0.2);

    CHECK_THROWS_AS(SyntheticSpec::parse("gap"), std::invalid_argument);
    CHECK_THROWS_AS(SyntheticSpec::parse("width=3"), std::invalid_argument);
}

TEST_CASE("seed spec parsing") {
    CHECK(parse_seed_spec("42..51") ==
          std::vector<std::uint64_t>{42, 43, 44, 45, 46, 47, 48, 49, 50, 51});
    CHECK(parse_seed_spec("7") == std::vector<std::uint64_t>{7});
    CHECK(parse_seed_spec("3,1,9") == std::vector<std::uint64_t>{3, 1, 9});
    CHECK_THROWS_AS(parse_seed_spec("9..3"), std::invalid_argument);
    CHECK_THROWS_AS(parse_seed_spec(""), std::invalid_argument);
}

TEST_CASE("format_double is stable and round-trippable") {
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(1.0 / 3.0) == "0.333333333333");
    CHECK(format_double(-2.0) == "-2");
    CHECK(format_double(1e-9) == "1e-09");
}

TEST_CASE("sweep writes the full file layout with consistent aggregates") {
    TempDir tmp("fairboost_test_sweep");
    const SweepResult result = run_plan(small_plan(tmp.path.string()));

    CHECK(result.exit_code() == 0);
    CHECK(result.failed_cells == 0);
    // 1 adaboost + 2 fairproj epsilons, 3 seeds each
    CHECK(result.cells.size() == 9);
    CHECK(result.aggregates.size() == 3);

    for (const auto* name : {"results.csv", "cells.csv", "pareto.csv", "manifest.json"})
        CHECK(fs::exists(tmp.path / name));
    for (const auto& c : result.cells) {
        CHECK(fs::exists(tmp.path / "runs" / c.cell_id / "curves.csv"));
        CHECK(fs::exists(tmp.path / "runs" / c.cell_id / "runlog.json"));
    }

    // aggregates must be recomputable from the cells
    for (const auto& a : result.aggregates) {
        double sum = 0.0;
        int count = 0;
        for (const auto& c : result.cells) {
            if (c.mode != a.mode || c.epsilon != a.epsilon) continue;
            sum += c.accuracy;
            ++count;
        }
        REQUIRE(count == a.cells);
        CHECK(a.accuracy_mean == doctest::Approx(sum / count).epsilon(1e-12));
    }

    // results.csv carries one header plus one row per aggregate
    const auto lines = split(slurp(tmp.path / "results.csv"), '\n');
    REQUIRE(lines.size() >= 4);
    CHECK(lines[0] ==
          "dataset,mode,epsilon,cells,accuracy_mean,accuracy_std,eopp_mean,eopp_std,"
          "dp_mean,dp_std,rounds_mean,delta_mean");
    CHECK(split(lines[1], ',').size() == 12);

    // curves.csv has the run-log header and one row per recorded round
    const auto curves = split(slurp(tmp.path / "runs" / result.cells[0].cell_id / "curves.csv"),
                              '\n');
    CHECK(curves[0] ==
          "round,gamma_w,gamma_q,delta,eps_q,alpha,exp_loss,kl,max_violation,dual_iters");

    const nlohmann::json manifest = nlohmann::json::parse(slurp(tmp.path / "manifest.json"));
    CHECK(manifest.at("source").at("type") == "synthetic");
    CHECK(manifest.at("plan").at("rounds") == 6);
    CHECK(manifest.at("failed_cells") == 0);
    CHECK(manifest.at("conventions").at("prng") == "std::mt19937_64");
}

TEST_CASE("pareto table is sorted by descending epsilon with a trend column") {
    TempDir tmp("fairboost_test_pareto");
    run_plan(small_plan(tmp.path.string()));

    const auto lines = split(slurp(tmp.path / "pareto.csv"), '\n');
    REQUIRE(lines.size() >= 4);
    CHECK(lines[0] == "mode,epsilon,accuracy_mean,accuracy_std,eopp_mean,eopp_std,gap_trend");
    const auto row1 = split(lines[1], ',');
    const auto row2 = split(lines[2], ',');
    CHECK(row1[0] == "fairproj");
    CHECK(row2[0] == "fairproj");
    CHECK(std::stod(row1[1]) > std::stod(row2[1]));
    CHECK((row1[6] == "decreasing" || row1[6] == "non-monotone"));
}

TEST_CASE("concurrent execution reproduces the sequential results byte for byte") {
    TempDir seq_dir("fairboost_test_seq");
    TempDir par_dir("fairboost_test_par");

    ExperimentPlan seq = small_plan(seq_dir.path.string());
    seq.jobs = 1;
    ExperimentPlan par = small_plan(par_dir.path.string());
    par.jobs = 4;

    run_plan(seq);
    run_plan(par);

    for (const auto* name : {"results.csv", "cells.csv", "pareto.csv"})
        CHECK(slurp(seq_dir.path / name) == slurp(par_dir.path / name));
    // and again with the same job count: full determinism
    TempDir par2_dir("fairboost_test_par2");
    ExperimentPlan par2 = small_plan(par2_dir.path.string());
    par2.jobs = 4;
    run_plan(par2);
    CHECK(slurp(par_dir.path / "results.csv") == slurp(par2_dir.path / "results.csv"));
}

TEST_CASE("plan validation") {
    ExperimentPlan plan;
    plan.synthetic = SyntheticSpec{};
    plan.seeds = {1};
    plan.modes = {};
    CHECK_THROWS_AS(run_plan(plan), std::invalid_argument);

    plan.modes = {BoostMode::fairproj};
    plan.epsilon_grid = {};
    CHECK_THROWS_AS(run_plan(plan), std::invalid_argument);

    plan.modes = {BoostMode::adaboost};
    plan.seeds = {};
    CHECK_THROWS_AS(run_plan(plan), std::invalid_argument);

    plan.seeds = {1};
    plan.synthetic.reset();
    CHECK_THROWS_AS(run_plan(plan), std::invalid_argument);
}
