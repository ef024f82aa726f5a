#pragma once

#include <cstdint>
#include <vector>

#include "fairboost/dataset.hpp"
#include "fairboost/distributions.hpp"

namespace fairboost {

/// Depth-1 threshold classifier: predicts polarity when
/// x[feature] > threshold, -polarity otherwise.
struct DecisionStump {
    int feature = 0;
    double threshold = 0.0;
    int polarity = +1;

    int predict(const std::vector<double>& x) const;
};

struct StumpFitReport {
    DecisionStump stump;
    double weighted_error = 0.0;  // under the training weights, <= 0.5
    std::int64_t candidate_count = 0;
};

/// Exact minimizer of weighted 0-1 error over all (feature, midpoint
/// threshold, polarity) candidates via per-feature sort + prefix sweep.
/// Ties break toward lower feature index, then lower threshold, then
/// polarity +1.
StumpFitReport fit_stump(const Dataset& d, const SimplexWeights& weights);

/// (1/2) sum_i p_i y_i h(x_i); equals 1/2 - weighted error.
double edge(const DecisionStump& h, const Dataset& d, const SimplexWeights& p);

double weighted_error(const DecisionStump& h, const Dataset& d, const SimplexWeights& p);

}  // namespace fairboost
