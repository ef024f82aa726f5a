#include "fairboost/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace fairboost {

GroupConfusion confusion(const Dataset& d, const Ensemble& f) {
    if (d.size() == 0) throw std::invalid_argument("empty dataset");
    GroupConfusion c;
    for (const auto& e : d.examples()) {
        const int pred = f.predict(e.features);
        const int a = e.protected_group;
        if (e.label == +1)
            (pred == +1 ? c.tp[a] : c.fn[a])++;
        else
            (pred == +1 ? c.fp[a] : c.tn[a])++;
    }
    return c;
}

double accuracy(const GroupConfusion& c) {
    const auto total = c.total();
    if (total == 0) throw std::invalid_argument("empty confusion");
    return static_cast<double>(c.tp[0] + c.tp[1] + c.tn[0] + c.tn[1]) /
           static_cast<double>(total);
}

std::optional<double> eopp_gap(const GroupConfusion& c) {
    const std::int64_t pos0 = c.tp[0] + c.fn[0];
    const std::int64_t pos1 = c.tp[1] + c.fn[1];
    if (pos0 == 0 || pos1 == 0) return std::nullopt;
    const double tpr0 = static_cast<double>(c.tp[0]) / static_cast<double>(pos0);
    const double tpr1 = static_cast<double>(c.tp[1]) / static_cast<double>(pos1);
    return std::abs(tpr1 - tpr0);
}

std::optional<double> dp_gap(const GroupConfusion& c) {
    const std::int64_t n0 = c.group_total(0);
    const std::int64_t n1 = c.group_total(1);
    if (n0 == 0 || n1 == 0) return std::nullopt;
    const double r0 = static_cast<double>(c.tp[0] + c.fp[0]) / static_cast<double>(n0);
    const double r1 = static_cast<double>(c.tp[1] + c.fp[1]) / static_cast<double>(n1);
    return std::abs(r1 - r0);
}

std::optional<double> dp_gap(const Dataset& d, const Ensemble& f) {
    return dp_gap(confusion(d, f));
}

}  // namespace fairboost
