#pragma once

#include <string>
#include <vector>

#include "graph.hpp"
#include "simulate.hpp"
#include "types.hpp"

namespace wavecig {

struct ForecastReport {
    Vector alpha;             // node-specific autoregressive coefficients
    double beta = 0.0;        // shared network coefficient, 0 without edges
    bool network_term = false;
    std::vector<double> mspe;  // mspe[h - 1], mean over nodes
    Matrix forecasts;          // H x P plug-in forecasts
};

/// GNAR(1,[1]) least squares on the first T - H observations, then recursive
/// forecasts for horizons 1..H scored against the held-out tail. With no
/// edges the network column is dropped and each node is an AR(1). A positive
/// `ridge` adds ridge * I to the normal equations.
inline ForecastReport fit_gnar_forecast(const TimeSeries& x, const Graph& graph, int horizon, double ridge = 0.0) {
    const Index T = x.rows();
    const Index P = x.cols();
    if (horizon < 1) throw ConfigError("forecast horizon must be >= 1");
    if (ridge < 0.0) throw ConfigError("ridge penalty must be >= 0");
    if (graph.node_count() != P)
        throw DataError("graph has " + std::to_string(graph.node_count()) + " nodes but data has " +
                        std::to_string(P) + " channels");
    const Index n = T - horizon;
    if (n <= P + 2)
        throw DataError("need more than P + 2 training observations (T - H = " + std::to_string(n) + ")");
    if (!x.allFinite()) throw DataError("input contains non-finite values");

    const Matrix w = stage_weights(graph, 1);
    ForecastReport rep;
    rep.network_term = graph.edge_count() > 0;
    const Index cols = P + (rep.network_term ? 1 : 0);
    const Index rows = (n - 1) * P;
    Matrix design = Matrix::Zero(rows, cols);
    Vector y(rows);
    for (Index t = 1; t < n; ++t) {
        const Vector nb = w * x.row(t - 1).transpose();
        for (Index i = 0; i < P; ++i) {
            const Index r = (t - 1) * P + i;
            y(r) = x(t, i);
            design(r, i) = x(t - 1, i);
            if (rep.network_term) design(r, P) = nb(i);
        }
    }
    Vector coef;
    if (ridge > 0.0) {
        const Matrix gram = design.transpose() * design + ridge * Matrix::Identity(cols, cols);
        coef = gram.ldlt().solve(design.transpose() * y);
    } else {
        Eigen::ColPivHouseholderQR<Matrix> qr(design);
        if (qr.rank() < cols)
            throw NumericalError("forecast design matrix is rank deficient (rank " + std::to_string(qr.rank()) +
                                 " of " + std::to_string(cols) + "); retry with a ridge penalty");
        coef = qr.solve(y);
    }
    rep.alpha = coef.head(P);
    rep.beta = rep.network_term ? coef(P) : 0.0;
    Matrix a = rep.alpha.asDiagonal();
    if (rep.network_term) a += rep.beta * w;

    rep.forecasts.resize(horizon, P);
    Vector state = x.row(n - 1).transpose();
    for (int h = 1; h <= horizon; ++h) {
        state = a * state;
        rep.forecasts.row(h - 1) = state.transpose();
        rep.mspe.push_back((state.transpose() - x.row(n - 1 + h)).squaredNorm() / static_cast<double>(P));
    }
    return rep;
}

}  // namespace wavecig
