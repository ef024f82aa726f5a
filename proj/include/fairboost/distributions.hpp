#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fairboost/dataset.hpp"

namespace fairboost {

/// Per-example margins y_i * f(x_i).
struct MarginVector {
    std::vector<double> scores;

    std::size_t size() const { return scores.size(); }
};

/// A point on the n-simplex. Construction validates non-negativity and
/// normalization (sum within 1e-9 of 1).
class SimplexWeights {
public:
    explicit SimplexWeights(std::vector<double> weights);

    static SimplexWeights uniform(std::size_t n);
    /// Normalizes a non-negative vector with positive mass.
    static SimplexWeights from_unnormalized(std::vector<double> raw);

    const std::vector<double>& values() const { return w_; }
    double operator[](std::size_t i) const { return w_[i]; }
    std::size_t size() const { return w_.size(); }

private:
    std::vector<double> w_;
};

/// The K x n constraint-feature matrix g with uniform bound G = max |g_k(i)|.
struct ConstraintFeatures {
    std::size_t K = 0;
    std::size_t n = 0;
    std::vector<double> g;  // row-major, K rows of length n
    double bound = 1.0;
    std::vector<std::string> labels;

    const double* row(std::size_t k) const { return g.data() + k * n; }
    /// <w, g_k>
    double moment(const SimplexWeights& w, std::size_t k) const;
    double max_abs_moment(const SimplexWeights& w) const;
};

enum class Surrogate { dp, eopp, eodds };

Surrogate parse_surrogate(const std::string& name);
std::string surrogate_name(Surrogate s);

/// log(sum_i exp(x[i])), max-shifted.
double log_sum_exp(const std::vector<double>& x);

/// q_i proportional to exp(-margin_i), shifted by the max exponent before
/// exponentiating. All margins zero gives the uniform distribution.
SimplexWeights exponential_weights(const MarginVector& margins);

/// KL(p || q) in nats with the 0 * log(0/.) := 0 convention. Returns +inf
/// when absolute continuity fails (q_i = 0 < p_i).
double kl_divergence(const SimplexWeights& p, const SimplexWeights& q);

/// (1/2) sum |p_i - q_i|, in [0, 1].
double total_variation(const SimplexWeights& p, const SimplexWeights& q);

/// sqrt(max(KL(w||q), 0) / 2) -- the per-round fairness cost.
double pinsker_delta(const SimplexWeights& w, const SimplexWeights& q);

/// Group-balance constraint rows: dp balances total group weight, eopp
/// balances weight on positives across groups, eodds adds the negatives row.
ConstraintFeatures build_constraints(const Dataset& d, Surrogate surrogate);

}  // namespace fairboost
