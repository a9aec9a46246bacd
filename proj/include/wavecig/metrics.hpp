#pragma once

#include "graph.hpp"
#include "types.hpp"

namespace wavecig {

struct EdgeRates {
    double tpr = 0.0;
    double fpr = 0.0;
    double tdr = 0.0;
    int tp = 0;
    int fp = 0;
    int fn = 0;
    int tn = 0;
};

/// Counts over unordered pairs. An empty prediction scores TDR = 1, an empty
/// truth scores TPR = 1, and a complete truth scores FPR = 0.
inline EdgeRates edge_rates(const Graph& estimated, const Graph& truth) {
    if (estimated.node_count() != truth.node_count())
        throw DataError("edge_rates: estimate has " + std::to_string(estimated.node_count()) +
                        " nodes but truth has " + std::to_string(truth.node_count()));
    EdgeRates r;
    const int P = truth.node_count();
    for (int p = 0; p < P; ++p)
        for (int q = p + 1; q < P; ++q) {
            const bool e = estimated.has_edge(p, q);
            const bool t = truth.has_edge(p, q);
            r.tp += e && t;
            r.fp += e && !t;
            r.fn += !e && t;
            r.tn += !e && !t;
        }
    r.tpr = r.tp + r.fn > 0 ? static_cast<double>(r.tp) / (r.tp + r.fn) : 1.0;
    r.fpr = r.fp + r.tn > 0 ? static_cast<double>(r.fp) / (r.fp + r.tn) : 0.0;
    r.tdr = r.tp + r.fp > 0 ? static_cast<double>(r.tp) / (r.tp + r.fp) : 1.0;
    return r;
}

}  // namespace wavecig
