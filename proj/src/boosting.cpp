#include "fairboost/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace fairboost {

BoostMode parse_mode(const std::string& name) {
    if (name == "fairproj") return BoostMode::fairproj;
    if (name == "adaboost") return BoostMode::adaboost;
    if (name == "reweighing") return BoostMode::reweighing;
    throw std::invalid_argument("unknown mode: " + name);
}

std::string mode_name(BoostMode m) {
    switch (m) {
        case BoostMode::fairproj: return "fairproj";
        case BoostMode::adaboost: return "adaboost";
        case BoostMode::reweighing: return "reweighing";
    }
    return "?";
}

std::string termination_name(TerminationReason r) {
    switch (r) {
        case TerminationReason::completed: return "completed";
        case TerminationReason::no_useful_weak_learner: return "no-useful-weak-learner";
        case TerminationReason::perfect_fit: return "perfect-fit";
    }
    return "?";
}

double Ensemble::score(const std::vector<double>& x) const {
    double s = 0.0;
    for (const auto& t : terms) s += t.alpha * t.stump.predict(x);
    return s;
}

int Ensemble::predict(const std::vector<double>& x) const {
    return score(x) >= 0.0 ? +1 : -1;
}

double compute_alpha(double eps_q, double floor) {
    if (eps_q >= 0.5)
        throw std::logic_error("compute_alpha called with eps_q >= 0.5; caller must stop");
    if (!(floor > 0.0 && floor < 0.5)) throw std::invalid_argument("error floor out of (0, 0.5)");
    const double e = std::max(eps_q, floor);
    return 0.5 * std::log((1.0 - e) / e);
}

double log_exp_loss(const Dataset& d, const Ensemble& f) {
    std::vector<double> neg_margins(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto& e = d.examples()[i];
        neg_margins[i] = -static_cast<double>(e.label) * f.score(e.features);
    }
    return log_sum_exp(neg_margins);
}

double exp_loss(const Dataset& d, const Ensemble& f) {
    return std::exp(log_exp_loss(d, f));
}

namespace {

struct LoopState {
    std::vector<double> margins;      // y_i * f_t(x_i)
    std::vector<double> log_tilt;     // log v_i for reweighing, empty otherwise
    std::vector<double> tilt_scores;  // scratch: margins - log_tilt
};

// Distribution used for stump fitting in baseline modes and for alpha in all
// modes; for reweighing this is the statically tilted exponential-weights
// distribution.
SimplexWeights alpha_distribution(const LoopState& st) {
    if (st.log_tilt.empty()) return exponential_weights({st.margins});
    MarginVector mv;
    mv.scores.resize(st.margins.size());
    for (std::size_t i = 0; i < st.margins.size(); ++i)
        mv.scores[i] = st.margins[i] - st.log_tilt[i];
    return exponential_weights(mv);
}

double tracked_log_loss(const LoopState& st) {
    std::vector<double> s(st.margins.size());
    for (std::size_t i = 0; i < st.margins.size(); ++i) {
        s[i] = -st.margins[i];
        if (!st.log_tilt.empty()) s[i] += st.log_tilt[i];
    }
    return log_sum_exp(s);
}

std::int64_t training_errors(const Dataset& d, const std::vector<double>& margins) {
    std::int64_t errs = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double fx = margins[i] * d.examples()[i].label;  // f(x_i)
        const int pred = fx >= 0.0 ? +1 : -1;
        if (pred != d.examples()[i].label) ++errs;
    }
    return errs;
}

BoostResult run_loop(const Dataset& d, const BoostConfig& cfg) {
    if (cfg.rounds < 1) throw std::invalid_argument("rounds must be >= 1");
    if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    const std::size_t n = d.size();
    const double floor =
        cfg.error_floor > 0.0 ? cfg.error_floor : 1.0 / (2.0 * static_cast<double>(n));
    if (!(floor > 0.0 && floor < 0.5)) throw std::invalid_argument("error floor out of (0, 0.5)");

    LoopState st;
    st.margins.assign(n, 0.0);

    if (cfg.mode == BoostMode::reweighing) {
        // Kamiran-Calders cell weights v(a, y) = n_a * n_y / (n * n_{a,y}),
        // normalized onto the simplex.
        const auto& c = d.group_counts();
        double v[2][2];  // [a][y>0]
        for (int a = 0; a < 2; ++a) {
            for (int ypos = 0; ypos < 2; ++ypos) {
                const std::int64_t cell = ypos ? c.pos[a] : c.neg[a];
                if (cell == 0)
                    throw std::invalid_argument("reweighing requires all (group, label) cells "
                                                "non-empty");
                const std::int64_t ny = ypos ? c.pos[0] + c.pos[1] : c.neg[0] + c.neg[1];
                v[a][ypos] = static_cast<double>(c.n[a]) * static_cast<double>(ny) /
                             (static_cast<double>(n) * static_cast<double>(cell));
            }
        }
        double sum = 0.0;
        std::vector<double> tilt(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& e = d.examples()[i];
            tilt[i] = v[e.protected_group][e.label > 0 ? 1 : 0];
            sum += tilt[i];
        }
        st.log_tilt.resize(n);
        for (std::size_t i = 0; i < n; ++i) st.log_tilt[i] = std::log(tilt[i] / sum);
    }

    ConstraintFeatures constraints;
    ProjectionConfig proj_cfg = cfg.projection;
    proj_cfg.epsilon = cfg.epsilon;
    std::optional<std::vector<double>> warm;
    if (cfg.mode == BoostMode::fairproj) {
        constraints = build_constraints(d, cfg.surrogate);
        warm = std::vector<double>(constraints.K, 0.0);
    }

    BoostResult result;
    result.log.config = cfg;
    result.log.n = static_cast<std::int64_t>(n);
    result.ensemble.reason = TerminationReason::completed;

    double prev_log_loss = tracked_log_loss(st);  // log n for untitled modes

    for (int t = 1; t <= cfg.rounds; ++t) {
        const SimplexWeights q = alpha_distribution(st);

        SimplexWeights w = q;
        double delta = 0.0, kl = 0.0, max_violation = 0.0;
        int dual_iters = 0;
        if (cfg.mode == BoostMode::fairproj) {
            ProjectionResult proj = [&] {
                try {
                    return project(q, constraints, proj_cfg, warm);
                } catch (const projection_error& e) {
                    throw projection_error("round " + std::to_string(t) + ": " + e.what());
                }
            }();
            w = std::move(proj.w);
            delta = proj.delta;
            kl = proj.kl_direct;
            max_violation = proj.max_violation;
            dual_iters = proj.dual.iterations;
            warm = proj.dual.lambda;
        } else if (cfg.mode == BoostMode::adaboost || cfg.mode == BoostMode::reweighing) {
            max_violation = 0.0;
        }

        const StumpFitReport fit = fit_stump(d, w);
        const double gamma_w = edge(fit.stump, d, w);
        const double gamma_q = edge(fit.stump, d, q);
        const double eps_q = 0.5 - gamma_q;

        if (gamma_q < gamma_w - delta - 1e-9)
            throw std::runtime_error("edge-transfer inequality violated at round " +
                                     std::to_string(t));

        if (eps_q >= 0.5) {
            result.ensemble.reason = TerminationReason::no_useful_weak_learner;
            break;
        }

        const double alpha = compute_alpha(eps_q, floor);
        result.ensemble.terms.push_back({alpha, fit.stump});
        for (std::size_t i = 0; i < n; ++i) {
            const auto& e = d.examples()[i];
            st.margins[i] += alpha * e.label * fit.stump.predict(e.features);
        }

        const double log_loss = tracked_log_loss(st);
        // recursion: L_t = L_{t-1} * (eps_q e^a + (1-eps_q) e^-a); equals
        // 2 sqrt(eps_q (1-eps_q)) exactly when the floor clamp is inactive
        const double factor = eps_q * std::exp(alpha) + (1.0 - eps_q) * std::exp(-alpha);
        if (std::abs(log_loss - prev_log_loss - std::log(factor)) >
            1e-8 * std::max(1.0, std::abs(log_loss)))
            throw std::runtime_error("exponential-loss recursion violated at round " +
                                     std::to_string(t));
        prev_log_loss = log_loss;

        RoundDiagnostics diag;
        diag.round = t;
        diag.gamma_w = gamma_w;
        diag.gamma_q = gamma_q;
        diag.delta = delta;
        diag.eps_q = eps_q;
        diag.alpha = alpha;
        {
            std::vector<double> neg(n);
            for (std::size_t i = 0; i < n; ++i) neg[i] = -st.margins[i];
            diag.log_exp_loss = log_sum_exp(neg);
        }
        diag.exp_loss = std::exp(diag.log_exp_loss);
        diag.kl = kl;
        diag.max_violation = max_violation;
        diag.dual_iterations = dual_iters;
        result.log.rounds.push_back(diag);

        if (eps_q < floor && training_errors(d, st.margins) == 0) {
            result.ensemble.reason = TerminationReason::perfect_fit;
            break;
        }
    }

    result.log.reason = result.ensemble.reason;
    return result;
}

}  // namespace

BoostResult run_fairproj(const Dataset& d, const BoostConfig& cfg) {
    BoostConfig c = cfg;
    c.mode = BoostMode::fairproj;
    return run_loop(d, c);
}

BoostResult run_adaboost(const Dataset& d, const BoostConfig& cfg) {
    BoostConfig c = cfg;
    c.mode = BoostMode::adaboost;
    return run_loop(d, c);
}

BoostResult run_reweighing(const Dataset& d, const BoostConfig& cfg) {
    BoostConfig c = cfg;
    c.mode = BoostMode::reweighing;
    return run_loop(d, c);
}

BoostResult run_boosting(const Dataset& d, const BoostConfig& cfg) {
    return run_loop(d, cfg);
}

std::string RunLog::to_json() const {
    nlohmann::json j;
    j["config"] = {
        {"rounds", config.rounds},
        {"epsilon", config.epsilon},
        {"surrogate", surrogate_name(config.surrogate)},
        {"mode", mode_name(config.mode)},
        {"error_floor", config.error_floor},
        {"projection",
         {{"grad_tolerance", config.projection.grad_tolerance},
          {"max_iterations", config.projection.max_iterations},
          {"mode", config.projection.mode == DualSolverMode::split_variable ? "split-variable"
                                                                            : "smoothed-l1"},
          {"smoothing_mu", config.projection.smoothing_mu}}},
    };
    j["n"] = n;
    j["reason"] = termination_name(reason);
    j["rounds"] = nlohmann::json::array();
    for (const auto& r : rounds) {
        j["rounds"].push_back({{"round", r.round},
                               {"gamma_w", r.gamma_w},
                               {"gamma_q", r.gamma_q},
                               {"delta", r.delta},
                               {"eps_q", r.eps_q},
                               {"alpha", r.alpha},
                               {"exp_loss", r.exp_loss},
                               {"log_exp_loss", r.log_exp_loss},
                               {"kl", r.kl},
                               {"max_violation", r.max_violation},
                               {"dual_iters", r.dual_iterations}});
    }
    return j.dump(2);
}

RunLog RunLog::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    RunLog log;
    const auto& c = j.at("config");
    log.config.rounds = c.at("rounds").get<int>();
    log.config.epsilon = c.at("epsilon").get<double>();
    log.config.surrogate = parse_surrogate(c.at("surrogate").get<std::string>());
    log.config.mode = parse_mode(c.at("mode").get<std::string>());
    log.config.error_floor = c.at("error_floor").get<double>();
    const auto& p = c.at("projection");
    log.config.projection.grad_tolerance = p.at("grad_tolerance").get<double>();
    log.config.projection.max_iterations = p.at("max_iterations").get<int>();
    log.config.projection.mode = p.at("mode").get<std::string>() == "smoothed-l1"
                                     ? DualSolverMode::smoothed_l1
                                     : DualSolverMode::split_variable;
    log.config.projection.smoothing_mu = p.at("smoothing_mu").get<double>();
    log.n = j.at("n").get<std::int64_t>();
    const std::string reason = j.at("reason").get<std::string>();
    log.reason = reason == "no-useful-weak-learner" ? TerminationReason::no_useful_weak_learner
                 : reason == "perfect-fit"          ? TerminationReason::perfect_fit
                                                    : TerminationReason::completed;
    for (const auto& r : j.at("rounds")) {
        RoundDiagnostics d;
        d.round = r.at("round").get<int>();
        d.gamma_w = r.at("gamma_w").get<double>();
        d.gamma_q = r.at("gamma_q").get<double>();
        d.delta = r.at("delta").get<double>();
        d.eps_q = r.at("eps_q").get<double>();
        d.alpha = r.at("alpha").get<double>();
        d.exp_loss = r.at("exp_loss").get<double>();
        d.log_exp_loss = r.at("log_exp_loss").get<double>();
        d.kl = r.at("kl").get<double>();
        d.max_violation = r.at("max_violation").get<double>();
        d.dual_iterations = r.at("dual_iters").get<int>();
        log.rounds.push_back(d);
    }
    return log;
}

std::string RunLog::to_csv() const {
    std::ostringstream out;
    out << "round,gamma_w,gamma_q,delta,eps_q,alpha,exp_loss,kl,max_violation,dual_iters\n";
    char buf[512];
    for (const auto& r : rounds) {
        std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%d\n",
                      r.round, r.gamma_w, r.gamma_q, r.delta, r.eps_q, r.alpha, r.exp_loss, r.kl,
                      r.max_violation, r.dual_iterations);
        out << buf;
    }
    return out.str();
}

BoundReport check_theorem_bound(const RunLog& log) {
    BoundReport rep;
    const double log_n = std::log(static_cast<double>(log.n));

    // maximal prefix with gamma_w > delta at every round
    std::size_t prefix = 0;
    while (prefix < log.rounds.size() &&
           log.rounds[prefix].gamma_w > log.rounds[prefix].delta)
        ++prefix;
    rep.prefix_rounds = prefix;
    rep.vacuous_rounds = log.rounds.size() - prefix;

    if (prefix > 0) {
        double sum = 0.0;
        for (std::size_t t = 0; t < prefix; ++t) {
            const double eff = log.rounds[t].gamma_w - log.rounds[t].delta;
            sum += eff * eff;
        }
        const double log_bound = log_n - 2.0 * sum;
        rep.prefix_loss = std::exp(log.rounds[prefix - 1].log_exp_loss);
        rep.prefix_bound = std::exp(log_bound);
        rep.prefix_bound_holds =
            log.rounds[prefix - 1].log_exp_loss <= log_bound + std::log1p(1e-8);
    }

    // q-side bound holds at every round regardless of the precondition
    double sum_q = 0.0;
    rep.worst_q_margin = std::numeric_limits<double>::infinity();
    for (const auto& r : log.rounds) {
        sum_q += r.gamma_q * r.gamma_q;
        const double margin = (log_n - 2.0 * sum_q) - r.log_exp_loss;
        rep.worst_q_margin = std::min(rep.worst_q_margin, margin);
        if (margin < -std::log1p(1e-8)) rep.q_side_holds = false;
    }
    return rep;
}

SufficientConditionReport check_sufficient_condition(const RunLog& log, double gamma_min,
                                                     double D) {
    SufficientConditionReport rep;
    double gmin = std::numeric_limits<double>::infinity();
    double klmax = 0.0;
    bool all_pos = true;
    for (const auto& r : log.rounds) {
        gmin = std::min(gmin, r.gamma_w);
        klmax = std::max(klmax, r.kl);
        if (r.gamma_w - r.delta <= 0.0) all_pos = false;
    }
    if (log.rounds.empty()) gmin = 0.0;
    rep.gamma_min = gamma_min >= 0.0 ? gamma_min : gmin;
    rep.kl_max = D >= 0.0 ? D : klmax;
    rep.threshold = std::sqrt(rep.kl_max / 2.0);
    rep.holds = rep.gamma_min > rep.threshold;
    rep.all_effective_edges_positive = all_pos;
    return rep;
}

}  // namespace fairboost
