#include "fairboost/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fairboost {

namespace {

struct LogPartition {
    double log_z;
    std::vector<double> w;         // tilted distribution w(lambda)
    std::vector<double> moments;   // E_w[g_k]
};

LogPartition evaluate_partition(const std::vector<double>& lambda, const SimplexWeights& q,
                                const ConstraintFeatures& g) {
    const std::size_t n = q.size();
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        double e = std::log(q[i]);
        for (std::size_t k = 0; k < g.K; ++k) e -= lambda[k] * g.row(k)[i];
        s[i] = e;
    }
    LogPartition lp;
    lp.log_z = log_sum_exp(s);
    lp.w.resize(n);
    for (std::size_t i = 0; i < n; ++i) lp.w[i] = std::exp(s[i] - lp.log_z);
    lp.moments.assign(g.K, 0.0);
    for (std::size_t k = 0; k < g.K; ++k) {
        const double* gk = g.row(k);
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m += lp.w[i] * gk[i];
        lp.moments[k] = m;
    }
    return lp;
}

double l1_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}

}  // namespace

DualObjective dual_objective(const std::vector<double>& lambda, const SimplexWeights& q,
                             const ConstraintFeatures& g, double epsilon, DualSolverMode mode,
                             double mu) {
    if (lambda.size() != g.K) throw std::invalid_argument("lambda length != K");
    for (double l : lambda)
        if (!std::isfinite(l)) throw std::invalid_argument("non-finite lambda");

    const LogPartition lp = evaluate_partition(lambda, q, g);
    DualObjective out;
    out.value = lp.log_z;
    out.gradient.resize(g.K);
    for (std::size_t k = 0; k < g.K; ++k) {
        double penalty, dpenalty;
        if (mode == DualSolverMode::smoothed_l1) {
            const double r = std::sqrt(lambda[k] * lambda[k] + mu);
            penalty = r;
            dpenalty = lambda[k] / r;
        } else {
            penalty = std::abs(lambda[k]);
            dpenalty = lambda[k] > 0 ? 1.0 : (lambda[k] < 0 ? -1.0 : 0.0);
        }
        out.value += epsilon * penalty;
        out.gradient[k] = -lp.moments[k] + epsilon * dpenalty;
    }
    return out;
}

namespace {

// Split-variable formulation: minimize log Z(lp - lm) + eps*sum(lp + lm)
// over lp, lm >= 0 with projected gradient + Armijo backtracking.
DualSolution solve_split(const SimplexWeights& q, const ConstraintFeatures& g,
                         const ProjectionConfig& cfg, const std::vector<double>& start) {
    const std::size_t K = g.K;
    std::vector<double> lp(K), lm(K);
    for (std::size_t k = 0; k < K; ++k) {
        lp[k] = std::max(start[k], 0.0);
        lm[k] = std::max(-start[k], 0.0);
    }

    auto objective = [&](const std::vector<double>& p, const std::vector<double>& m,
                         LogPartition* part_out) {
        std::vector<double> lambda(K);
        for (std::size_t k = 0; k < K; ++k) lambda[k] = p[k] - m[k];
        LogPartition part = evaluate_partition(lambda, q, g);
        double f = part.log_z;
        for (std::size_t k = 0; k < K; ++k) f += cfg.epsilon * (p[k] + m[k]);
        if (part_out) *part_out = std::move(part);
        return f;
    };

    LogPartition part;
    double f = objective(lp, lm, &part);
    int iter = 0;
    bool converged = false;
    double step = 1.0;

    for (; iter < cfg.max_iterations; ++iter) {
        std::vector<double> gp(K), gm(K);
        for (std::size_t k = 0; k < K; ++k) {
            gp[k] = -part.moments[k] + cfg.epsilon;
            gm[k] = part.moments[k] + cfg.epsilon;
        }

        // projected gradient: free coordinates use the raw gradient, bound
        // coordinates only count descent directions
        double pg_inf = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            const double pgk = lp[k] > 0 ? gp[k] : std::min(gp[k], 0.0);
            const double mgk = lm[k] > 0 ? gm[k] : std::min(gm[k], 0.0);
            pg_inf = std::max({pg_inf, std::abs(pgk), std::abs(mgk)});
        }
        if (pg_inf <= cfg.grad_tolerance) {
            converged = true;
            break;
        }
        // alternate test: primal feasible + complementary slackness
        double viol = 0.0, cs = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            viol = std::max(viol, std::abs(part.moments[k]) - cfg.epsilon);
            cs = std::max({cs, std::abs(lp[k] * (part.moments[k] - cfg.epsilon)),
                           std::abs(lm[k] * (part.moments[k] + cfg.epsilon))});
        }
        if (viol <= cfg.grad_tolerance && cs <= cfg.grad_tolerance) {
            converged = true;
            break;
        }

        // backtracking line search on the projected step
        double eta = std::min(step * 2.0, 1e6);
        bool accepted = false;
        while (eta >= 1e-18) {
            std::vector<double> np(K), nm(K);
            double move2 = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                np[k] = std::max(0.0, lp[k] - eta * gp[k]);
                nm[k] = std::max(0.0, lm[k] - eta * gm[k]);
                move2 += (np[k] - lp[k]) * (np[k] - lp[k]) + (nm[k] - lm[k]) * (nm[k] - lm[k]);
            }
            if (move2 == 0.0) break;
            LogPartition npart;
            const double nf = objective(np, nm, &npart);
            if (std::isnan(nf)) throw projection_error("NaN in dual line search");
            if (nf <= f - 1e-4 * move2 / eta) {
                lp = std::move(np);
                lm = std::move(nm);
                part = std::move(npart);
                f = nf;
                step = eta;
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if (!accepted) break;  // no admissible step left; best iterate stands
    }

    DualSolution sol;
    sol.lambda.resize(K);
    for (std::size_t k = 0; k < K; ++k) sol.lambda[k] = lp[k] - lm[k];
    sol.dual_value = part.log_z + cfg.epsilon * l1_norm(sol.lambda);
    sol.kl_value = -sol.dual_value;
    sol.iterations = iter;
    sol.converged = converged;
    sol.active.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        sol.active[k] = part.moments[k] > cfg.epsilon - 1e-6
                            ? 1
                            : (part.moments[k] < -cfg.epsilon + 1e-6 ? -1 : 0);
    }
    return sol;
}

// Smoothed-l1 mode: plain gradient descent on the differentiable surrogate.
DualSolution solve_smoothed(const SimplexWeights& q, const ConstraintFeatures& g,
                            const ProjectionConfig& cfg, const std::vector<double>& start) {
    const std::size_t K = g.K;
    std::vector<double> lambda = start;
    DualObjective cur = dual_objective(lambda, q, g, cfg.epsilon, DualSolverMode::smoothed_l1,
                                       cfg.smoothing_mu);
    int iter = 0;
    bool converged = false;
    double step = 1.0;

    for (; iter < cfg.max_iterations; ++iter) {
        double ginf = 0.0;
        for (double v : cur.gradient) ginf = std::max(ginf, std::abs(v));
        if (ginf <= cfg.grad_tolerance) {
            converged = true;
            break;
        }
        double eta = std::min(step * 2.0, 1e6);
        bool accepted = false;
        while (eta >= 1e-18) {
            std::vector<double> next(K);
            double move2 = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                next[k] = lambda[k] - eta * cur.gradient[k];
                move2 += (next[k] - lambda[k]) * (next[k] - lambda[k]);
            }
            DualObjective nxt = dual_objective(next, q, g, cfg.epsilon,
                                               DualSolverMode::smoothed_l1, cfg.smoothing_mu);
            if (std::isnan(nxt.value)) throw projection_error("NaN in dual line search");
            if (nxt.value <= cur.value - 1e-4 * move2 / eta) {
                lambda = std::move(next);
                cur = std::move(nxt);
                step = eta;
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if (!accepted) break;
    }

    const LogPartition part = evaluate_partition(lambda, q, g);
    DualSolution sol;
    sol.lambda = lambda;
    sol.dual_value = part.log_z + cfg.epsilon * l1_norm(lambda);
    sol.kl_value = -sol.dual_value;
    sol.iterations = iter;
    sol.converged = converged;
    sol.active.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        sol.active[k] = part.moments[k] > cfg.epsilon - 1e-6
                            ? 1
                            : (part.moments[k] < -cfg.epsilon + 1e-6 ? -1 : 0);
    }
    return sol;
}

}  // namespace

DualSolution solve_dual(const SimplexWeights& q, const ConstraintFeatures& g,
                        const ProjectionConfig& cfg,
                        const std::optional<std::vector<double>>& warm_start) {
    if (g.K == 0) throw std::invalid_argument("no constraints");
    if (g.n != q.size()) throw std::invalid_argument("constraint/weight length mismatch");
    if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    for (std::size_t i = 0; i < q.size(); ++i)
        if (q[i] <= 0.0) throw std::invalid_argument("q must be strictly positive");

    std::vector<double> start(g.K, 0.0);
    if (warm_start) {
        if (warm_start->size() != g.K) throw std::invalid_argument("warm start length != K");
        start = *warm_start;
    }
    return cfg.mode == DualSolverMode::split_variable ? solve_split(q, g, cfg, start)
                                                      : solve_smoothed(q, g, cfg, start);
}

SimplexWeights primal_from_dual(const SimplexWeights& q, const ConstraintFeatures& g,
                                const std::vector<double>& lambda) {
    if (lambda.size() != g.K) throw std::invalid_argument("lambda length != K");
    bool all_zero = true;
    for (double l : lambda) {
        if (!std::isfinite(l)) throw std::invalid_argument("non-finite lambda");
        if (l != 0.0) all_zero = false;
    }
    if (all_zero) return q;  // identity tilt, bit-exact

    const LogPartition lp = evaluate_partition(lambda, q, g);
    return SimplexWeights::from_unnormalized(std::vector<double>(lp.w));
}

ProjectionResult project(const SimplexWeights& q, const ConstraintFeatures& g,
                         const ProjectionConfig& cfg,
                         const std::optional<std::vector<double>>& warm_start) {
    DualSolution dual = solve_dual(q, g, cfg, warm_start);
    SimplexWeights w = primal_from_dual(q, g, dual.lambda);

    ProjectionResult res{std::move(w), std::move(dual), 0.0, 0.0, 0.0};
    res.kl_direct = kl_divergence(res.w, q);
    res.delta = std::sqrt(std::max(res.kl_direct, 0.0) / 2.0);
    res.max_violation = g.max_abs_moment(res.w);

    if (!res.dual.converged && res.max_violation > cfg.epsilon + 1e-4)
        throw projection_error("projection failed to converge (violation " +
                               std::to_string(res.max_violation - cfg.epsilon) + ")");
    return res;
}

BruteForceResult brute_force_project(const SimplexWeights& q, const ConstraintFeatures& g,
                                     double epsilon, int resolution) {
    const std::size_t n = q.size();
    if (n > 4) throw std::invalid_argument("brute-force oracle limited to n <= 4");
    if (resolution < 1) throw std::invalid_argument("resolution must be >= 1");
    const int R = resolution;
    const std::size_t K = g.K;

    // per-index tables: cost[i][k] = (k/R) log((k/R)/q_i), mom[ki][i] contribution
    std::vector<double> log_frac(R + 1, 0.0);
    for (int k = 1; k <= R; ++k) log_frac[k] = std::log(static_cast<double>(k) / R);
    std::vector<std::vector<double>> cost(n, std::vector<double>(R + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        const double lq = std::log(q[i]);
        for (int k = 1; k <= R; ++k)
            cost[i][k] = (static_cast<double>(k) / R) * (log_frac[k] - lq);
    }

    double best_kl = std::numeric_limits<double>::infinity();
    std::vector<int> best(n, 0);
    std::vector<double> mom(K);

    auto consider = [&](const std::vector<int>& comp) {
        for (std::size_t k = 0; k < K; ++k) {
            double m = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                m += (static_cast<double>(comp[i]) / R) * g.row(k)[i];
            mom[k] = m;
            if (std::abs(m) > epsilon) return;
        }
        double kl = 0.0;
        for (std::size_t i = 0; i < n; ++i) kl += cost[i][comp[i]];
        if (kl < best_kl) {
            best_kl = kl;
            best = comp;
        }
    };

    std::vector<int> comp(n);
    if (n == 1) {
        comp[0] = R;
        consider(comp);
    } else if (n == 2) {
        for (int a = 0; a <= R; ++a) {
            comp[0] = a;
            comp[1] = R - a;
            consider(comp);
        }
    } else if (n == 3) {
        for (int a = 0; a <= R; ++a)
            for (int b = 0; b <= R - a; ++b) {
                comp[0] = a;
                comp[1] = b;
                comp[2] = R - a - b;
                consider(comp);
            }
    } else {
        // n == 4: hot loop; keep per-level partial sums of cost and moments
        const double* c0 = cost[0].data();
        const double* c1 = cost[1].data();
        const double* c2 = cost[2].data();
        const double* c3 = cost[3].data();
        std::vector<const double*> grows(K);
        for (std::size_t k = 0; k < K; ++k) grows[k] = g.row(k);
        for (int a = 0; a <= R; ++a) {
            for (int b = 0; b <= R - a; ++b) {
                const double cab = c0[a] + c1[b];
                for (int c = 0; c <= R - a - b; ++c) {
                    const int d = R - a - b - c;
                    bool feasible = true;
                    for (std::size_t k = 0; k < K; ++k) {
                        const double m = (a * grows[k][0] + b * grows[k][1] + c * grows[k][2] +
                                          d * grows[k][3]) /
                                         R;
                        if (std::abs(m) > epsilon) {
                            feasible = false;
                            break;
                        }
                    }
                    if (!feasible) continue;
                    const double kl = cab + c2[c] + c3[d];
                    if (kl < best_kl) {
                        best_kl = kl;
                        best = {a, b, c, d};
                    }
                }
            }
        }
    }

    if (!std::isfinite(best_kl))
        throw projection_error("brute-force oracle: no feasible grid point");
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = static_cast<double>(best[i]) / R;
    return {SimplexWeights::from_unnormalized(std::move(w)), best_kl};
}

}  // namespace fairboost
