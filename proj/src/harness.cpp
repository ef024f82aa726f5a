#include "fairboost/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "fairboost/metrics.hpp"

namespace fairboost {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

SyntheticSpec SyntheticSpec::parse(const std::string& text) {
    SyntheticSpec spec;
    std::stringstream ss(text);
    std::string kv;
    while (std::getline(ss, kv, ',')) {
        if (kv.empty()) continue;
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("synthetic spec entry needs key=value: " + kv);
        const std::string key = kv.substr(0, eq);
        const std::string val = kv.substr(eq + 1);
        if (key == "n")
            spec.n = std::stoll(val);
        else if (key == "imbalance")
            spec.group_imbalance = std::stod(val);
        else if (key == "gap")
            spec.base_rate_gap = std::stod(val);
        else if (key == "noise")
            spec.noise = std::stod(val);
        else
            throw std::invalid_argument("unknown synthetic spec key: " + key);
    }
    return spec;
}

std::vector<std::uint64_t> parse_seed_spec(const std::string& spec) {
    std::vector<std::uint64_t> seeds;
    const auto range = spec.find("..");
    if (range != std::string::npos) {
        const std::uint64_t lo = std::stoull(spec.substr(0, range));
        const std::uint64_t hi = std::stoull(spec.substr(range + 2));
        if (hi < lo) throw std::invalid_argument("bad seed range: " + spec);
        for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
        return seeds;
    }
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) seeds.push_back(std::stoull(tok));
    if (seeds.empty()) throw std::invalid_argument("empty seed spec");
    return seeds;
}

int SweepResult::exit_code() const {
    if (failed_cells == 0) return 0;
    return failed_cells == static_cast<int>(cells.size()) ? 1 : 2;
}

void emit_curves(const RunLog& log, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << log.to_csv();
    if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

struct CellSpec {
    BoostMode mode;
    double epsilon;  // 0 for baseline modes
    std::uint64_t seed;
    std::string id;
};

std::string cell_id(BoostMode mode, double eps, std::uint64_t seed) {
    std::string id = mode_name(mode);
    if (mode == BoostMode::fairproj) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "_eps%g", eps);
        id += buf;
    }
    id += "_seed" + std::to_string(seed);
    return id;
}

std::string opt_str(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

struct MeanStd {
    double mean = 0.0, std = 0.0;
    int count = 0;
};

MeanStd mean_std(const std::vector<double>& xs) {
    MeanStd ms;
    ms.count = static_cast<int>(xs.size());
    if (xs.empty()) return ms;
    double sum = 0.0;
    for (double x : xs) sum += x;
    ms.mean = sum / ms.count;
    if (ms.count >= 2) {
        double ss = 0.0;
        for (double x : xs) ss += (x - ms.mean) * (x - ms.mean);
        ms.std = std::sqrt(ss / (ms.count - 1));
    }
    return ms;
}

CellResult execute_cell(const ExperimentPlan& plan, const CellSpec& cell,
                        const Dataset* shared_data) {
    CellResult res;
    res.mode = cell.mode;
    res.epsilon = cell.epsilon;
    res.seed = cell.seed;
    res.cell_id = cell.id;
    try {
        std::optional<Dataset> synth;
        const Dataset* data = shared_data;
        if (!data) {
            const auto& s = *plan.synthetic;
            synth = make_synthetic(s.n, s.group_imbalance, s.base_rate_gap, s.noise, cell.seed);
            data = &*synth;
        }
        auto [train, test] = train_test_split(*data, plan.test_fraction, cell.seed);

        BoostConfig cfg;
        cfg.rounds = plan.rounds;
        cfg.mode = cell.mode;
        cfg.surrogate = plan.surrogate;
        // baselines never consult epsilon; keep it valid and inert
        cfg.epsilon = cell.mode == BoostMode::fairproj ? cell.epsilon : 1.0;

        const BoostResult run = run_boosting(train, cfg);

        const GroupConfusion c = confusion(test, run.ensemble);
        res.accuracy = accuracy(c);
        res.eopp = eopp_gap(c);
        res.dp = dp_gap(c);
        res.rounds_used = static_cast<int>(run.ensemble.terms.size());
        double delta_sum = 0.0;
        for (const auto& r : run.log.rounds) delta_sum += r.delta;
        res.mean_delta = run.log.rounds.empty() ? 0.0 : delta_sum / run.log.rounds.size();

        const fs::path run_dir = fs::path(plan.out_dir) / "runs" / cell.id;
        fs::create_directories(run_dir);
        emit_curves(run.log, (run_dir / "curves.csv").string());
        std::ofstream jlog(run_dir / "runlog.json", std::ios::binary);
        jlog << run.log.to_json();
    } catch (const std::exception& e) {
        res.failed = true;
        res.error = e.what();
    }
    return res;
}

}  // namespace

void emit_pareto(const SweepResult& result, const std::string& path) {
    std::vector<const Aggregate*> fair, base;
    for (const auto& a : result.aggregates)
        (a.mode == BoostMode::fairproj ? fair : base).push_back(&a);
    if (fair.empty())
        std::cerr << "warning: no fairness-mode cells; pareto file is baseline-only\n";
    std::stable_sort(fair.begin(), fair.end(),
                     [](const Aggregate* a, const Aggregate* b) { return a->epsilon > b->epsilon; });

    // is the gap non-increasing as epsilon shrinks?
    std::string trend = "decreasing";
    for (std::size_t i = 1; i < fair.size(); ++i) {
        if (fair[i]->eopp_mean && fair[i - 1]->eopp_mean &&
            *fair[i]->eopp_mean > *fair[i - 1]->eopp_mean + 1e-12)
            trend = "non-monotone";
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "mode,epsilon,accuracy_mean,accuracy_std,eopp_mean,eopp_std,gap_trend\n";
    auto row = [&](const Aggregate& a, const std::string& tr) {
        out << mode_name(a.mode) << ',' << format_double(a.epsilon) << ','
            << format_double(a.accuracy_mean) << ',' << format_double(a.accuracy_std) << ','
            << opt_str(a.eopp_mean) << ',' << opt_str(a.eopp_std) << ',' << tr << '\n';
    };
    for (const auto* a : fair) row(*a, fair.size() >= 2 ? trend : "");
    for (const auto* a : base) row(*a, "");
    if (!out) throw std::runtime_error("write failed: " + path);
}

SweepResult run_plan(const ExperimentPlan& plan) {
    if (plan.modes.empty()) throw std::invalid_argument("plan has no modes");
    if (plan.seeds.empty()) throw std::invalid_argument("plan has no seeds");
    if (plan.rounds < 1) throw std::invalid_argument("plan rounds must be >= 1");
    const bool has_fairproj =
        std::find(plan.modes.begin(), plan.modes.end(), BoostMode::fairproj) != plan.modes.end();
    if (has_fairproj && plan.epsilon_grid.empty())
        throw std::invalid_argument("fairproj mode requires a non-empty epsilon grid");
    if (!plan.synthetic && plan.csv_path.empty())
        throw std::invalid_argument("plan needs a data source (csv or synthetic)");

    std::optional<Dataset> csv_data;
    if (!plan.csv_path.empty())
        csv_data = load_csv(plan.csv_path, SchemaConfig::from_json_file(plan.schema_path));

    std::vector<CellSpec> cells;
    for (BoostMode mode : plan.modes) {
        const std::vector<double> eps_list =
            mode == BoostMode::fairproj ? plan.epsilon_grid : std::vector<double>{0.0};
        for (double eps : eps_list)
            for (std::uint64_t seed : plan.seeds)
                cells.push_back({mode, eps, seed, cell_id(mode, eps, seed)});
    }

    fs::create_directories(fs::path(plan.out_dir) / "runs");

    SweepResult result;
    result.cells.resize(cells.size());
    std::atomic<std::size_t> next{0};
    const int jobs = std::max(1, plan.jobs);
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) break;
            result.cells[i] = execute_cell(plan, cells[i], csv_data ? &*csv_data : nullptr);
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (const auto& c : result.cells)
        if (c.failed) result.failed_cells++;

    // aggregate per (mode, epsilon) in plan order
    for (BoostMode mode : plan.modes) {
        const std::vector<double> eps_list =
            mode == BoostMode::fairproj ? plan.epsilon_grid : std::vector<double>{0.0};
        for (double eps : eps_list) {
            std::vector<double> acc, eopp, dp, rounds, deltas;
            int count = 0;
            for (const auto& c : result.cells) {
                if (c.mode != mode || c.epsilon != eps || c.failed) continue;
                ++count;
                acc.push_back(c.accuracy);
                if (c.eopp) eopp.push_back(*c.eopp);
                if (c.dp) dp.push_back(*c.dp);
                rounds.push_back(c.rounds_used);
                deltas.push_back(c.mean_delta);
            }
            Aggregate a;
            a.mode = mode;
            a.epsilon = eps;
            a.cells = count;
            const MeanStd am = mean_std(acc);
            a.accuracy_mean = am.mean;
            a.accuracy_std = am.std;
            if (!eopp.empty()) {
                const MeanStd m = mean_std(eopp);
                a.eopp_mean = m.mean;
                a.eopp_std = m.std;
            }
            if (!dp.empty()) {
                const MeanStd m = mean_std(dp);
                a.dp_mean = m.mean;
                a.dp_std = m.std;
            }
            a.rounds_mean = mean_std(rounds).mean;
            a.delta_mean = mean_std(deltas).mean;
            result.aggregates.push_back(a);
        }
    }

    // per-cell table
    {
        std::ofstream out(fs::path(plan.out_dir) / "cells.csv", std::ios::binary);
        out << "cell_id,mode,epsilon,seed,status,accuracy,eopp_gap,dp_gap,rounds,mean_delta\n";
        for (const auto& c : result.cells) {
            out << c.cell_id << ',' << mode_name(c.mode) << ',' << format_double(c.epsilon) << ','
                << c.seed << ',' << (c.failed ? "failed" : "ok") << ',';
            if (c.failed)
                out << ",,,,\n";
            else
                out << format_double(c.accuracy) << ',' << opt_str(c.eopp) << ',' << opt_str(c.dp)
                    << ',' << c.rounds_used << ',' << format_double(c.mean_delta) << '\n';
        }
    }

    // aggregate results table
    {
        std::ofstream out(fs::path(plan.out_dir) / "results.csv", std::ios::binary);
        out << "dataset,mode,epsilon,cells,accuracy_mean,accuracy_std,eopp_mean,eopp_std,"
               "dp_mean,dp_std,rounds_mean,delta_mean\n";
        for (const auto& a : result.aggregates) {
            out << plan.dataset_name << ',' << mode_name(a.mode) << ',' << format_double(a.epsilon)
                << ',' << a.cells << ',' << format_double(a.accuracy_mean) << ','
                << format_double(a.accuracy_std) << ',' << opt_str(a.eopp_mean) << ','
                << opt_str(a.eopp_std) << ',' << opt_str(a.dp_mean) << ',' << opt_str(a.dp_std)
                << ',' << format_double(a.rounds_mean) << ',' << format_double(a.delta_mean)
                << '\n';
        }
    }

    emit_pareto(result, (fs::path(plan.out_dir) / "pareto.csv").string());

    {
        nlohmann::json manifest;
        manifest["dataset"] = plan.dataset_name;
        if (plan.synthetic) {
            manifest["source"] = {{"type", "synthetic"},
                                  {"n", plan.synthetic->n},
                                  {"imbalance", plan.synthetic->group_imbalance},
                                  {"gap", plan.synthetic->base_rate_gap},
                                  {"noise", plan.synthetic->noise}};
        } else {
            manifest["source"] = {{"type", "csv"},
                                  {"path", plan.csv_path},
                                  {"schema", plan.schema_path}};
        }
        std::vector<std::string> mode_names;
        for (auto m : plan.modes) mode_names.push_back(mode_name(m));
        manifest["plan"] = {{"modes", mode_names},
                            {"epsilon_grid", plan.epsilon_grid},
                            {"surrogate", surrogate_name(plan.surrogate)},
                            {"rounds", plan.rounds},
                            {"seeds", plan.seeds},
                            {"test_fraction", plan.test_fraction},
                            {"jobs", plan.jobs}};
        manifest["conventions"] = {
            {"prng", "std::mt19937_64"},
            {"rounds_counted", "rounds that appended a term; the breaking round is not counted"},
            {"std", "sample standard deviation (ddof=1), 0 for a single cell"},
            {"sign_zero", "+1"}};
        manifest["failed_cells"] = result.failed_cells;
        std::ofstream out(fs::path(plan.out_dir) / "manifest.json", std::ios::binary);
        out << manifest.dump(2) << '\n';
    }

    return result;
}

}  // namespace fairboost
