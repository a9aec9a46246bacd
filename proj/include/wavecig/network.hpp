#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "glasso.hpp"
#include "graph.hpp"
#include "types.hpp"

namespace wavecig {

struct EdgeValue {
    Edge edge;
    double value = 0.0;
};

struct EdgeValueSet {
    int scale = 0;
    int nodes = 0;
    std::vector<EdgeValue> values;
};

/// |Theta_pq| for every thresholded off-diagonal pair p < q.
inline EdgeValueSet edge_values(const PrecisionEstimate& est, double threshold = kSupportThreshold) {
    EdgeValueSet set;
    set.scale = est.scale;
    set.nodes = static_cast<int>(est.theta.rows());
    for (Index p = 0; p < est.theta.rows(); ++p)
        for (Index q = p + 1; q < est.theta.cols(); ++q) {
            const double v = std::max(std::abs(est.theta(p, q)), std::abs(est.theta(q, p)));
            if (v >= threshold) set.values.push_back({{static_cast<int>(p), static_cast<int>(q)}, v});
        }
    return set;
}

struct TwoMeans {
    double low = 0.0;
    double high = 0.0;
    std::vector<bool> upper;  // membership of the high cluster
    int iterations = 0;
};

/// One-dimensional Lloyd iterations with k = 2 started at (0, max). The lower
/// centre is the noise cluster and stays at 0 while it is empty. Points
/// equidistant from both centres join the lower cluster.
inline TwoMeans two_means(const std::vector<double>& x, int max_iter = 100) {
    TwoMeans r;
    if (x.empty()) return r;
    r.low = 0.0;
    r.high = *std::max_element(x.begin(), x.end());
    r.upper.assign(x.size(), false);
    for (int it = 1; it <= max_iter; ++it) {
        r.iterations = it;
        bool changed = false;
        double sl = 0.0, sh = 0.0;
        int nl = 0, nh = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const bool up = std::abs(x[i] - r.high) < std::abs(x[i] - r.low);
            changed = changed || up != r.upper[i];
            r.upper[i] = up;
            if (up) {
                sh += x[i];
                ++nh;
            } else {
                sl += x[i];
                ++nl;
            }
        }
        r.low = nl > 0 ? sl / nl : 0.0;
        if (nh > 0) r.high = sh / nh;
        if (!changed && it > 1) break;
    }
    return r;
}

/// Edges in the cluster whose centre lies farther from zero.
inline Graph cluster_edges(const EdgeValueSet& set) {
    Graph g(set.nodes);
    if (set.values.empty()) return g;
    std::vector<double> v;
    v.reserve(set.values.size());
    for (const auto& e : set.values) v.push_back(std::abs(e.value));
    const TwoMeans km = two_means(v);
    for (std::size_t i = 0; i < v.size(); ++i)
        if (km.upper[i]) g.add_edge(set.values[i].edge.first, set.values[i].edge.second);
    return g;
}

enum class ScaleHintKind { Finest, Middle, Explicit };

struct ScaleHint {
    ScaleHintKind kind = ScaleHintKind::Finest;
    int scale = 1;

    static ScaleHint finest() { return {ScaleHintKind::Finest, 1}; }
    static ScaleHint middle() { return {ScaleHintKind::Middle, 0}; }
    static ScaleHint at(int j) { return {ScaleHintKind::Explicit, j}; }

    /// "finest", "middle" or a positive integer.
    static ScaleHint parse(const std::string& s) {
        if (s == "finest") return finest();
        if (s == "middle") return middle();
        try {
            std::size_t used = 0;
            const int j = std::stoi(s, &used);
            if (used == s.size() && j >= 1) return at(j);
        } catch (const std::exception&) {
        }
        throw ConfigError("scale must be 'finest', 'middle' or a positive integer, got '" + s + "'");
    }

    int resolve(int levels) const {
        switch (kind) {
            case ScaleHintKind::Finest: return 1;
            case ScaleHintKind::Middle: return std::max(1, levels / 2);
            case ScaleHintKind::Explicit:
                if (scale < 1 || scale > levels)
                    throw ConfigError("scale " + std::to_string(scale) + " is outside 1.." + std::to_string(levels));
                return scale;
        }
        return 1;
    }
};

inline Graph discover_network(const std::vector<PrecisionEstimate>& estimates, ScaleHint hint = ScaleHint::finest()) {
    if (estimates.empty()) throw DataError("discover_network: no scale estimates supplied");
    const int j = hint.resolve(static_cast<int>(estimates.size()));
    EdgeValueSet set = edge_values(estimates[static_cast<std::size_t>(j - 1)]);
    set.scale = j;
    return cluster_edges(set);
}

}  // namespace wavecig
