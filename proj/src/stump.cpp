#include "fairboost/stump.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fairboost {

int DecisionStump::predict(const std::vector<double>& x) const {
    if (feature < 0 || static_cast<std::size_t>(feature) >= x.size())
        throw std::invalid_argument("stump feature index out of range");
    return x[static_cast<std::size_t>(feature)] > threshold ? polarity : -polarity;
}

StumpFitReport fit_stump(const Dataset& d, const SimplexWeights& weights) {
    const std::size_t n = d.size();
    if (n == 0) throw std::invalid_argument("empty dataset");
    if (weights.size() != n) throw std::invalid_argument("weight length mismatch");
    const std::size_t width = d.width();

    StumpFitReport best;
    best.weighted_error = std::numeric_limits<double>::infinity();
    best.candidate_count = 0;

    std::vector<std::size_t> order(n);
    std::vector<double> column(n);

    for (std::size_t j = 0; j < width; ++j) {
        for (std::size_t i = 0; i < n; ++i) column[i] = d.examples()[i].features[j];
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return column[a] < column[b]; });

        // err_plus = error of (threshold t, polarity +1); everything starts
        // predicted +1 at the below-min sentinel
        double err_plus = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (d.examples()[i].label == -1) err_plus += weights[i];

        auto try_candidate = [&](double threshold, double ep) {
            best.candidate_count += 2;
            // evaluate +1 before -1 so ties keep polarity +1
            for (int polarity : {+1, -1}) {
                const double err = polarity == +1 ? ep : 1.0 - ep;
                if (err < best.weighted_error) {
                    best.weighted_error = err;
                    best.stump = {static_cast<int>(j), threshold, polarity};
                }
            }
        };

        const double lo = column[order[0]];
        try_candidate(lo - 1.0, err_plus);  // sentinel: all points above threshold

        for (std::size_t r = 0; r < n; ++r) {
            const std::size_t i = order[r];
            // moving the cut past point i flips its prediction to -polarity
            err_plus += d.examples()[i].label == +1 ? weights[i] : -weights[i];
            const bool boundary = r + 1 < n && column[order[r + 1]] > column[i];
            if (boundary)
                try_candidate(0.5 * (column[i] + column[order[r + 1]]), err_plus);
        }
    }
    return best;
}

double edge(const DecisionStump& h, const Dataset& d, const SimplexWeights& p) {
    if (p.size() != d.size()) throw std::invalid_argument("weight length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto& e = d.examples()[i];
        s += p[i] * e.label * h.predict(e.features);
    }
    return 0.5 * s;
}

double weighted_error(const DecisionStump& h, const Dataset& d, const SimplexWeights& p) {
    if (p.size() != d.size()) throw std::invalid_argument("weight length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto& e = d.examples()[i];
        if (h.predict(e.features) != e.label) s += p[i];
    }
    return s;
}

}  // namespace fairboost
