#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"

#include "fairboost/boosting.hpp"
#include "fairboost/harness.hpp"
#include "fairboost/metrics.hpp"
#include "fairboost/projection.hpp"

namespace fs = std::filesystem;
using namespace fairboost;

namespace {

struct DataArgs {
    std::string data_path;
    std::string schema_path;
    std::string synthetic;
};

void add_data_flags(CLI::App* app, DataArgs& args) {
    app->add_option("--data", args.data_path, "CSV dataset path");
    app->add_option("--schema", args.schema_path, "schema config (JSON) for --data");
    app->add_option("--synthetic", args.synthetic,
                    "synthetic spec, e.g. n=2000,imbalance=0.5,gap=0.4,noise=0.8");
}

Dataset load_data(const DataArgs& args, std::uint64_t seed) {
    if (!args.data_path.empty()) {
        if (args.schema_path.empty())
            throw std::runtime_error("--data requires --schema");
        return load_csv(args.data_path, SchemaConfig::from_json_file(args.schema_path));
    }
    if (args.synthetic.empty())
        throw std::runtime_error("provide --data/--schema or --synthetic");
    const SyntheticSpec s = SyntheticSpec::parse(args.synthetic);
    return make_synthetic(s.n, s.group_imbalance, s.base_rate_gap, s.noise, seed);
}

int cmd_train(const DataArgs& data_args, const std::string& mode, const std::string& surrogate,
              double epsilon, int rounds, std::uint64_t seed, double test_fraction,
              const std::string& out_dir) {
    const Dataset data = load_data(data_args, seed);
    auto [train, test] = train_test_split(data, test_fraction, seed);

    BoostConfig cfg;
    cfg.mode = parse_mode(mode);
    cfg.surrogate = parse_surrogate(surrogate);
    cfg.epsilon = epsilon;
    cfg.rounds = rounds;
    const BoostResult run = run_boosting(train, cfg);

    fs::create_directories(out_dir);
    emit_curves(run.log, (fs::path(out_dir) / "curves.csv").string());
    std::ofstream jlog(fs::path(out_dir) / "runlog.json", std::ios::binary);
    jlog << run.log.to_json();

    const GroupConfusion c = confusion(test, run.ensemble);
    const auto eopp = eopp_gap(c);
    const auto dp = dp_gap(c);
    std::cout << "mode=" << mode << " rounds_used=" << run.ensemble.terms.size()
              << " termination=" << termination_name(run.ensemble.reason) << "\n"
              << "test_accuracy=" << format_double(accuracy(c))
              << " eopp_gap=" << (eopp ? format_double(*eopp) : "undefined")
              << " dp_gap=" << (dp ? format_double(*dp) : "undefined") << "\n"
              << "curves written to " << (fs::path(out_dir) / "curves.csv").string() << "\n";
    return 0;
}

int cmd_project_check(int instances, int resolution, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick_n(2, 4);
    std::uniform_real_distribution<double> unif(0.05, 1.0);
    std::uniform_int_distribution<int> ternary(-1, 1);
    const double eps_values[] = {0.0, 0.05, 0.2, 0.5};

    int failures = 0;
    double worst_gap = 0.0, worst_violation = 0.0;
    for (int it = 0; it < instances; ++it) {
        const int n = pick_n(rng);
        std::vector<double> raw(n);
        for (double& v : raw) v = unif(rng);
        const SimplexWeights q = SimplexWeights::from_unnormalized(std::move(raw));

        // group-difference style features in {-1, 0, +1}; both signs present
        // so that even the eps = 0 polytope is non-empty
        ConstraintFeatures g;
        g.K = 1;
        g.n = static_cast<std::size_t>(n);
        g.g.resize(n);
        do {
            for (double& v : g.g) v = static_cast<double>(ternary(rng));
        } while (*std::min_element(g.g.begin(), g.g.end()) > -1.0 ||
                 *std::max_element(g.g.begin(), g.g.end()) < 1.0);
        g.bound = 1.0;
        g.labels = {"random"};

        const double eps = eps_values[it % 4];
        ProjectionConfig cfg;
        // eps = 0 is solved as a tiny slack; the oracle uses the same value
        cfg.epsilon = std::max(eps, 1e-9);
        cfg.max_iterations = 5000;

        try {
            const ProjectionResult res = project(q, g, cfg);
            const BruteForceResult oracle = brute_force_project(q, g, cfg.epsilon, resolution);
            const double gap = std::abs(res.kl_direct - oracle.kl);
            const double viol = std::max(0.0, res.max_violation - cfg.epsilon);
            worst_gap = std::max(worst_gap, gap);
            worst_violation = std::max(worst_violation, viol);
            if (gap > 1e-3 || viol > 1e-6) {
                ++failures;
                std::cout << "FAIL instance " << it << " (n=" << n << " eps=" << eps
                          << "): kl gap " << gap << " violation " << viol << "\n";
            }
        } catch (const std::exception& e) {
            ++failures;
            std::cout << "FAIL instance " << it << ": " << e.what() << "\n";
        }
    }
    std::cout << "project-check: " << (instances - failures) << "/" << instances
              << " ok, worst kl gap " << format_double(worst_gap) << ", worst violation "
              << format_double(worst_violation) << "\n";
    return failures == 0 ? 0 : 1;
}

int cmd_verify(const std::string& log_path) {
    std::ifstream in(log_path, std::ios::binary);
    if (!in) {
        std::cerr << "cannot open " << log_path << "\n";
        return 1;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    const RunLog log = RunLog::from_json(ss.str());

    bool ok = true;
    for (const auto& r : log.rounds) {
        if (r.gamma_q < r.gamma_w - r.delta - 1e-9) {
            std::cout << "edge-transfer violated at round " << r.round << "\n";
            ok = false;
        }
    }

    const BoundReport bound = check_theorem_bound(log);
    std::cout << "rounds=" << log.rounds.size() << " termination=" << termination_name(log.reason)
              << "\n";
    if (bound.prefix_rounds > 0) {
        std::cout << "effective-edge prefix: " << bound.prefix_rounds << " rounds, loss "
                  << format_double(bound.prefix_loss) << " vs bound "
                  << format_double(bound.prefix_bound) << " -> "
                  << (bound.prefix_bound_holds ? "holds" : "VIOLATED") << "\n";
        ok = ok && bound.prefix_bound_holds;
    } else {
        std::cout << "effective-edge prefix empty (delta >= gamma_w from round 1): "
                  << "loss bound vacuous\n";
    }
    if (bound.vacuous_rounds > 0)
        std::cout << bound.vacuous_rounds << " round(s) with delta >= gamma_w reported vacuous\n";
    std::cout << "q-side bound: " << (bound.q_side_holds ? "holds" : "VIOLATED")
              << " (worst log margin " << format_double(bound.worst_q_margin) << ")\n";
    ok = ok && bound.q_side_holds;

    const SufficientConditionReport suff = check_sufficient_condition(log);
    std::cout << "sufficient condition: gamma_min " << format_double(suff.gamma_min)
              << " vs sqrt(KL_max/2) " << format_double(suff.threshold) << " -> "
              << (suff.holds ? "holds" : "fails") << "; effective edges "
              << (suff.all_effective_edges_positive ? "all positive" : "not all positive") << "\n";

    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FairProj boosting experiments"};
    app.require_subcommand(1);

    // train
    auto* train = app.add_subcommand("train", "single boosting run, emits training curves");
    DataArgs train_data;
    add_data_flags(train, train_data);
    std::string mode = "fairproj", surrogate = "eopp", out_dir = "out";
    double epsilon = 0.25, test_fraction = 0.2;
    int rounds = 100;
    std::uint64_t seed = 42;
    train->add_option("--mode", mode, "fairproj | adaboost | reweighing");
    train->add_option("--surrogate", surrogate, "dp | eopp | eodds");
    train->add_option("--epsilon", epsilon, "constraint slack");
    train->add_option("--rounds", rounds, "boosting rounds");
    train->add_option("--seed", seed, "split / generator seed");
    train->add_option("--test-fraction", test_fraction, "test split fraction");
    train->add_option("--out", out_dir, "output directory");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "full (mode, epsilon, seed) experiment sweep");
    DataArgs sweep_data;
    add_data_flags(sweep, sweep_data);
    std::vector<std::string> sweep_modes = {"adaboost", "fairproj"};
    std::vector<double> eps_grid;
    std::string seeds_spec = "42..51", sweep_surrogate = "eopp", sweep_out = "out",
                dataset_name;
    double sweep_fraction = 0.2;
    int sweep_rounds = 100, jobs = 1;
    sweep->add_option("--mode", sweep_modes, "modes to run (repeatable)");
    sweep->add_option("--epsilon", eps_grid, "fairproj slack grid (repeatable)");
    sweep->add_option("--surrogate", sweep_surrogate, "dp | eopp | eodds");
    sweep->add_option("--rounds", sweep_rounds, "boosting rounds");
    sweep->add_option("--seeds", seeds_spec, "seed list or range, e.g. 42..51");
    sweep->add_option("--test-fraction", sweep_fraction, "test split fraction");
    sweep->add_option("--out", sweep_out, "output directory");
    sweep->add_option("--jobs", jobs, "parallel worker count");
    sweep->add_option("--name", dataset_name, "dataset label in results.csv");

    // project-check
    auto* pc = app.add_subcommand("project-check", "projection solver vs brute-force oracle");
    int pc_instances = 100, pc_resolution = 1000;
    std::uint64_t pc_seed = 7;
    pc->add_option("--instances", pc_instances, "random instance count");
    pc->add_option("--resolution", pc_resolution, "oracle grid resolution");
    pc->add_option("--seed", pc_seed, "instance generator seed");

    // verify
    auto* verify = app.add_subcommand("verify", "bound checks on a stored run log");
    std::string log_path;
    verify->add_option("--log", log_path, "runlog.json path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed())
            return cmd_train(train_data, mode, surrogate, epsilon, rounds, seed, test_fraction,
                             out_dir);
        if (sweep->parsed()) {
            ExperimentPlan plan;
            plan.csv_path = sweep_data.data_path;
            plan.schema_path = sweep_data.schema_path;
            if (!sweep_data.synthetic.empty())
                plan.synthetic = SyntheticSpec::parse(sweep_data.synthetic);
            for (const auto& m : sweep_modes) plan.modes.push_back(parse_mode(m));
            plan.epsilon_grid = eps_grid;
            plan.surrogate = parse_surrogate(sweep_surrogate);
            plan.rounds = sweep_rounds;
            plan.seeds = parse_seed_spec(seeds_spec);
            plan.test_fraction = sweep_fraction;
            plan.out_dir = sweep_out;
            plan.jobs = jobs;
            plan.dataset_name = !dataset_name.empty() ? dataset_name
                                : !plan.csv_path.empty()
                                    ? fs::path(plan.csv_path).stem().string()
                                    : "synthetic";
            const SweepResult result = run_plan(plan);
            std::cout << "sweep: " << result.cells.size() - result.failed_cells << "/"
                      << result.cells.size() << " cells ok; results in " << plan.out_dir << "\n";
            for (const auto& c : result.cells)
                if (c.failed) std::cerr << "cell " << c.cell_id << " failed: " << c.error << "\n";
            return result.exit_code();
        }
        if (pc->parsed()) return cmd_project_check(pc_instances, pc_resolution, pc_seed);
        if (verify->parsed()) return cmd_verify(log_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
