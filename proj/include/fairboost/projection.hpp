#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "fairboost/distributions.hpp"

namespace fairboost {

enum class DualSolverMode { split_variable, smoothed_l1 };

struct ProjectionConfig {
    double epsilon = 0.1;
    double grad_tolerance = 1e-8;  // infinity norm of the projected gradient
    int max_iterations = 500;
    DualSolverMode mode = DualSolverMode::split_variable;
    double smoothing_mu = 1e-8;
};

struct DualSolution {
    std::vector<double> lambda;
    double dual_value = 0.0;  // log Z(lambda) + eps * ||lambda||_1
    double kl_value = 0.0;    // -dual_value, the projection divergence
    int iterations = 0;
    bool converged = false;
    std::vector<int> active;  // per constraint: sign of the active bound, 0 if inactive
};

struct ProjectionResult {
    SimplexWeights w;
    DualSolution dual;
    double delta = 0.0;          // pinsker_delta(w, q)
    double kl_direct = 0.0;      // KL(w || q) computed directly
    double max_violation = 0.0;  // max_k |<w, g_k>|
};

struct DualObjective {
    double value;
    std::vector<double> gradient;
};

class projection_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dual objective log Z(lambda) + eps*||lambda||_1 and its gradient
/// -E_{i~w(lambda)}[g(i)] + eps * d||lambda||_1. In smoothed mode |x| is
/// replaced by sqrt(x^2 + mu). log Z is max-shift stabilized.
DualObjective dual_objective(const std::vector<double>& lambda, const SimplexWeights& q,
                             const ConstraintFeatures& g, double epsilon,
                             DualSolverMode mode = DualSolverMode::split_variable,
                             double mu = 1e-8);

/// Minimizes the dual. Split-variable mode runs projected gradient descent
/// over (lambda+, lambda-) >= 0 with Armijo backtracking; smoothed mode runs
/// plain gradient descent on the smoothed objective.
DualSolution solve_dual(const SimplexWeights& q, const ConstraintFeatures& g,
                        const ProjectionConfig& cfg,
                        const std::optional<std::vector<double>>& warm_start = std::nullopt);

/// w_i = q_i exp(-lambda . g(i)) / Z(lambda).
SimplexWeights primal_from_dual(const SimplexWeights& q, const ConstraintFeatures& g,
                                const std::vector<double>& lambda);

/// Full KL projection of q onto C_eps: solve_dual + primal tilt + delta.
/// Throws projection_error when the solver fails to converge and the primal
/// violation exceeds 1e-4.
ProjectionResult project(const SimplexWeights& q, const ConstraintFeatures& g,
                         const ProjectionConfig& cfg,
                         const std::optional<std::vector<double>>& warm_start = std::nullopt);

struct BruteForceResult {
    SimplexWeights w;
    double kl = 0.0;
};

/// Exhaustive simplex-grid oracle for n <= 4; minimizes KL over feasible
/// grid points w_i = k_i / resolution. Throws projection_error when no grid
/// point is feasible.
BruteForceResult brute_force_project(const SimplexWeights& q, const ConstraintFeatures& g,
                                     double epsilon, int resolution);

}  // namespace fairboost
