#pragma once

#include <cstdint>
#include <optional>

#include "fairboost/boosting.hpp"
#include "fairboost/dataset.hpp"

namespace fairboost {

/// Per-group confusion counts, a in {0,1}.
struct GroupConfusion {
    std::int64_t tp[2] = {0, 0};
    std::int64_t fp[2] = {0, 0};
    std::int64_t tn[2] = {0, 0};
    std::int64_t fn[2] = {0, 0};

    std::int64_t group_total(int a) const { return tp[a] + fp[a] + tn[a] + fn[a]; }
    std::int64_t total() const { return group_total(0) + group_total(1); }
};

GroupConfusion confusion(const Dataset& d, const Ensemble& f);

double accuracy(const GroupConfusion& c);

/// |TPR_1 - TPR_0|; empty when a group has no positives.
std::optional<double> eopp_gap(const GroupConfusion& c);

/// |P(Yhat=1 | A=1) - P(Yhat=1 | A=0)|; empty when a group is empty.
std::optional<double> dp_gap(const GroupConfusion& c);

std::optional<double> dp_gap(const Dataset& d, const Ensemble& f);

}  // namespace fairboost
