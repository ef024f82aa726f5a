#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fairboost/dataset.hpp"
#include "fairboost/distributions.hpp"
#include "fairboost/projection.hpp"
#include "fairboost/stump.hpp"

namespace fairboost {

enum class BoostMode { fairproj, adaboost, reweighing };

BoostMode parse_mode(const std::string& name);
std::string mode_name(BoostMode m);

struct BoostConfig {
    int rounds = 100;
    double epsilon = 0.25;
    Surrogate surrogate = Surrogate::eopp;
    BoostMode mode = BoostMode::fairproj;
    double error_floor = 0.0;  // 0 means auto: 1/(2n)
    ProjectionConfig projection;
};

enum class TerminationReason { completed, no_useful_weak_learner, perfect_fit };

std::string termination_name(TerminationReason r);

struct EnsembleTerm {
    double alpha = 0.0;
    DecisionStump stump;
};

struct Ensemble {
    std::vector<EnsembleTerm> terms;
    TerminationReason reason = TerminationReason::completed;

    double score(const std::vector<double>& x) const;
    /// sign of the score; sign(0) := +1
    int predict(const std::vector<double>& x) const;
};

struct RoundDiagnostics {
    int round = 0;       // 1-based; only rounds that appended a term are logged
    double gamma_w = 0;  // edge of h_t under the fair distribution w^t
    double gamma_q = 0;  // edge of h_t under the ensemble distribution q^t
    double delta = 0;    // fairness cost sqrt(KL(w||q)/2)
    double eps_q = 0;    // weighted error under q^t (unclamped)
    double alpha = 0;
    double exp_loss = 0;  // unnormalized sum_i exp(-y_i f_t(x_i))
    double log_exp_loss = 0;
    double kl = 0;             // KL(w^t || q^t)
    double max_violation = 0;  // max_k |<w^t, g_k>|
    int dual_iterations = 0;
};

struct RunLog {
    BoostConfig config;
    std::int64_t n = 0;
    std::vector<RoundDiagnostics> rounds;
    TerminationReason reason = TerminationReason::completed;

    std::string to_json() const;
    static RunLog from_json(const std::string& text);
    /// Flat CSV, one row per round: round, gamma_w, gamma_q, delta, eps_q,
    /// alpha, exp_loss, kl, max_violation, dual_iters.
    std::string to_csv() const;
};

struct BoostResult {
    Ensemble ensemble;
    RunLog log;
};

/// Algorithm: per round compute q^t from margins, KL-project onto the
/// constraint set (warm-started dual), train the stump on w^t, evaluate its
/// error under q^t, stop if eps_q >= 0.5, otherwise set
/// alpha = (1/2) ln((1-eps_q)/eps_q) and update.
BoostResult run_fairproj(const Dataset& d, const BoostConfig& cfg);

/// Same loop with the projection skipped (w^t = q^t, delta = 0).
BoostResult run_adaboost(const Dataset& d, const BoostConfig& cfg);

/// AdaBoost under a static multiplicative tilt by Kamiran-Calders cell
/// weights v(a,y) = n_a * n_y / (n * n_{a,y}); alpha is computed under the
/// tilted distribution.
BoostResult run_reweighing(const Dataset& d, const BoostConfig& cfg);

/// Dispatch on cfg.mode.
BoostResult run_boosting(const Dataset& d, const BoostConfig& cfg);

/// alpha = (1/2) ln((1-e)/e) with e = max(eps_q, floor). Throws when
/// eps_q >= 0.5 (the caller must have stopped).
double compute_alpha(double eps_q, double floor);

/// sum_i exp(-y_i f(x_i)), evaluated through log-sum-exp.
double exp_loss(const Dataset& d, const Ensemble& f);
double log_exp_loss(const Dataset& d, const Ensemble& f);

struct BoundReport {
    std::size_t prefix_rounds = 0;  // maximal prefix with gamma_w > delta everywhere
    bool prefix_bound_holds = true;
    double prefix_loss = 0.0;  // exp_loss at prefix end
    double prefix_bound = 0.0; // n * exp(-2 sum (gamma_w - delta)^2)
    std::size_t vacuous_rounds = 0;  // rounds where gamma_w <= delta
    bool q_side_holds = true;  // exp_loss(t) <= n exp(-2 sum gamma_q^2), all t
    double worst_q_margin = 0.0;  // min over t of bound(t) - loss(t), log scale
};

/// Runtime verification of the exponential-loss bound against a run log.
BoundReport check_theorem_bound(const RunLog& log);

struct SufficientConditionReport {
    double gamma_min = 0.0;  // supplied or observed min over rounds of gamma_w
    double kl_max = 0.0;     // supplied D or observed max over rounds of KL
    double threshold = 0.0;  // sqrt(kl_max / 2)
    bool holds = false;      // gamma_min > threshold
    bool all_effective_edges_positive = false;
};

/// Diagnostic for the positive-effective-edge condition. Negative gamma_min
/// or D means "use the observed value from the log".
SufficientConditionReport check_sufficient_condition(const RunLog& log, double gamma_min = -1.0,
                                                     double D = -1.0);

}  // namespace fairboost
