#include "fairboost/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fairboost {

SimplexWeights::SimplexWeights(std::vector<double> weights) : w_(std::move(weights)) {
    if (w_.empty()) throw std::invalid_argument("simplex weights must be non-empty");
    double sum = 0.0;
    for (double v : w_) {
        if (!(v >= 0.0)) throw std::invalid_argument("simplex weights must be non-negative");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("simplex weights must sum to 1 (got " + std::to_string(sum) +
                                    ")");
}

SimplexWeights SimplexWeights::uniform(std::size_t n) {
    if (n == 0) throw std::invalid_argument("empty simplex");
    return SimplexWeights(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

SimplexWeights SimplexWeights::from_unnormalized(std::vector<double> raw) {
    double sum = 0.0;
    for (double v : raw) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument("unnormalized weights must be finite and non-negative");
        sum += v;
    }
    if (sum <= 0.0) throw std::invalid_argument("unnormalized weights have zero mass");
    for (double& v : raw) v /= sum;
    return SimplexWeights(std::move(raw));
}

double ConstraintFeatures::moment(const SimplexWeights& w, std::size_t k) const {
    const double* gk = row(k);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * gk[i];
    return s;
}

double ConstraintFeatures::max_abs_moment(const SimplexWeights& w) const {
    double m = 0.0;
    for (std::size_t k = 0; k < K; ++k) m = std::max(m, std::abs(moment(w, k)));
    return m;
}

Surrogate parse_surrogate(const std::string& name) {
    if (name == "dp") return Surrogate::dp;
    if (name == "eopp") return Surrogate::eopp;
    if (name == "eodds") return Surrogate::eodds;
    throw std::invalid_argument("unknown surrogate: " + name);
}

std::string surrogate_name(Surrogate s) {
    switch (s) {
        case Surrogate::dp: return "dp";
        case Surrogate::eopp: return "eopp";
        case Surrogate::eodds: return "eodds";
    }
    return "?";
}

double log_sum_exp(const std::vector<double>& x) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : x) mx = std::max(mx, v);
    if (!std::isfinite(mx)) return mx;  // all -inf (or a +inf present)
    double s = 0.0;
    for (double v : x) s += std::exp(v - mx);
    return mx + std::log(s);
}

SimplexWeights exponential_weights(const MarginVector& margins) {
    const auto& m = margins.scores;
    if (m.empty()) throw std::invalid_argument("empty margin vector");
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : m) {
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite margin");
        mx = std::max(mx, -v);
    }
    std::vector<double> w(m.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        w[i] = std::exp(-m[i] - mx);
        sum += w[i];
    }
    for (double& v : w) v /= sum;
    return SimplexWeights(std::move(w));
}

double kl_divergence(const SimplexWeights& p, const SimplexWeights& q) {
    if (p.size() != q.size()) throw std::invalid_argument("KL: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
        s += p[i] * std::log(p[i] / q[i]);
    }
    return s;
}

double total_variation(const SimplexWeights& p, const SimplexWeights& q) {
    if (p.size() != q.size()) throw std::invalid_argument("TV: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
    return 0.5 * s;
}

double pinsker_delta(const SimplexWeights& w, const SimplexWeights& q) {
    const double kl = kl_divergence(w, q);
    return std::sqrt(std::max(kl, 0.0) / 2.0);
}

ConstraintFeatures build_constraints(const Dataset& d, Surrogate surrogate) {
    const std::size_t n = d.size();
    ConstraintFeatures cf;
    cf.n = n;
    cf.bound = 1.0;

    auto group_sign = [](const Example& e) {
        return e.protected_group == 1 ? 1.0 : -1.0;
    };

    switch (surrogate) {
        case Surrogate::dp:
            cf.K = 1;
            cf.labels = {"dp"};
            cf.g.resize(n);
            for (std::size_t i = 0; i < n; ++i) cf.g[i] = group_sign(d.examples()[i]);
            break;
        case Surrogate::eopp:
            cf.K = 1;
            cf.labels = {"eopp"};
            cf.g.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                const auto& e = d.examples()[i];
                cf.g[i] = e.label == 1 ? group_sign(e) : 0.0;
            }
            break;
        case Surrogate::eodds:
            cf.K = 2;
            cf.labels = {"eodds_pos", "eodds_neg"};
            cf.g.resize(2 * n);
            for (std::size_t i = 0; i < n; ++i) {
                const auto& e = d.examples()[i];
                cf.g[i] = e.label == 1 ? group_sign(e) : 0.0;
                cf.g[n + i] = e.label == -1 ? group_sign(e) : 0.0;
            }
            break;
    }
    return cf;
}

}  // namespace fairboost
