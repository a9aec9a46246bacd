#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "glasso.hpp"
#include "graph.hpp"
#include "parallel.hpp"
#include "types.hpp"

namespace wavecig {

struct SmoothedSpectralDensity {
    int half_window = 0;              // m_t
    int window = 0;                   // L = 2 m_t + 1
    std::vector<double> frequencies;  // window centres in cycles per sample
    std::vector<CMatrix> matrices;    // one Hermitian P x P matrix per window

    int count() const { return static_cast<int>(matrices.size()); }
};

inline int default_half_window(Index T) {
    return std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(T)) / 2.0)));
}

inline int window_count(Index T, int half_window) {
    const int L = 2 * half_window + 1;
    const long long num = static_cast<long long>(T / 2) - half_window - 1;
    if (num < 0) return 0;
    return static_cast<int>(num / L);
}

/// Averages d(w) d(w)^H over M disjoint windows of L Fourier frequencies,
/// with d the 1/sqrt(T) normalized DFT. Frequencies 0 and T/2 are never used.
inline SmoothedSpectralDensity smoothed_spectral_matrix(const TimeSeries& x, int half_window) {
    const Index T = x.rows();
    const Index P = x.cols();
    if (T < 4 || T % 2 != 0) throw DataError("Fourier estimator needs an even series length >= 4, got " + std::to_string(T));
    if (half_window < 1) throw ConfigError("half window m_t must be >= 1");
    if (!x.allFinite()) throw DataError("input contains non-finite values");
    const int M = window_count(T, half_window);
    if (M < 1)
        throw ConfigError("half window m_t = " + std::to_string(half_window) + " leaves no complete window for T = " +
                          std::to_string(T) + "; use a smaller m_t");
    SmoothedSpectralDensity out;
    out.half_window = half_window;
    out.window = 2 * half_window + 1;
    const Index last = static_cast<Index>(M) * out.window;
    CMatrix d(last + 1, P);
    Eigen::FFT<double> fft;
    std::vector<double> column(static_cast<std::size_t>(T));
    std::vector<Complex> spectrum;
    const double norm = 1.0 / std::sqrt(static_cast<double>(T));
    for (Index p = 0; p < P; ++p) {
        for (Index t = 0; t < T; ++t) column[static_cast<std::size_t>(t)] = x(t, p);
        fft.fwd(spectrum, column);
        for (Index n = 1; n <= last; ++n) d(n, p) = spectrum[static_cast<std::size_t>(n)] * norm;
    }
    for (int l = 1; l <= M; ++l) {
        CMatrix f = CMatrix::Zero(P, P);
        const Index first = static_cast<Index>(l - 1) * out.window + 1;
        for (Index n = first; n < first + out.window; ++n) {
            const auto row = d.row(n).transpose();
            f.noalias() += row * row.adjoint();
        }
        f /= static_cast<double>(out.window);
        f = 0.5 * (f + f.adjoint()).eval();
        out.matrices.push_back(std::move(f));
        out.frequencies.push_back(static_cast<double>(first + half_window) / static_cast<double>(T));
    }
    return out;
}

/// Hermitian counterpart of regularize_pd.
inline CMatrix regularize_hpd(const CMatrix& m, double eps_rel = 1e-6) {
    const CMatrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(sym);
    if (eig.info() != Eigen::Success) throw NumericalError("regularize_hpd: eigendecomposition failed");
    const Vector& values = eig.eigenvalues();
    const double floor = eps_rel * std::max(values.maxCoeff(), 1e-12);
    if (values.minCoeff() >= floor * (1.0 - 1e-9)) return sym;
    const Vector clipped = values.cwiseMax(floor);
    CMatrix out = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().adjoint();
    return 0.5 * (out + out.adjoint());
}

/// [[Re, -Im], [Im, Re]]: the real symmetric 2P x 2P image of a Hermitian matrix.
inline Matrix real_embedding(const CMatrix& h) {
    const Index P = h.rows();
    Matrix r(2 * P, 2 * P);
    r.topLeftCorner(P, P) = h.real();
    r.topRightCorner(P, P) = -h.imag();
    r.bottomLeftCorner(P, P) = h.imag();
    r.bottomRightCorner(P, P) = h.real();
    return r;
}

inline CMatrix complex_from_embedding(const Matrix& r) {
    if (r.rows() % 2 != 0 || r.rows() != r.cols()) throw DataError("real embedding must be square of even size");
    const Index P = r.rows() / 2;
    CMatrix h(P, P);
    for (Index p = 0; p < P; ++p)
        for (Index q = 0; q < P; ++q)
            h(p, q) = Complex(0.5 * (r(p, q) + r(P + p, P + q)), 0.5 * (r(P + p, q) - r(p, P + q)));
    return h;
}

struct FourierConfig {
    int half_window = 0;  // 0 selects floor(sqrt(T) / 2)
    Criterion criterion = Criterion::BIC;
    double gamma = 0.5;
    int lambda_points = 20;
    double lambda_ratio = 1e-2;  // smallest grid penalty relative to the no-edge penalty
    double regularization = 1e-6;
    int max_iter = 10000;
    double tol = 1e-5;
    unsigned threads = 0;

    void validate() const {
        if (half_window < 0) throw ConfigError("half window m_t must be >= 1");
        if (gamma < 0.0 || gamma > 1.0) throw ConfigError("eBIC gamma must lie in [0, 1]");
        if (lambda_points < 1) throw ConfigError("lambda grid needs at least one point");
        if (!(lambda_ratio > 0.0 && lambda_ratio <= 1.0)) throw ConfigError("lambda ratio must lie in (0, 1]");
        if (!(regularization > 0.0)) throw ConfigError("regularization floor must be positive");
        if (max_iter < 1 || !(tol > 0.0)) throw ConfigError("solver max_iter and tol must be positive");
    }
};

struct FrequencyPrecisionSet {
    double penalty = 0.0;              // per-frequency penalty lambda' = lambda / L
    std::vector<CMatrix> precisions;   // empty matrix where the solve failed
    std::vector<int> failed;           // window indices (0-based) whose solve failed
    std::vector<int> edge_counts;
    double log_likelihood = 0.0;       // sum_l L [log det Q - tr(f Q)] over solved windows
    Matrix aggregate;                  // Qbar_pq = mean_l |Q_pq(w_l)|

    int solved() const { return static_cast<int>(precisions.size() - failed.size()); }
};

/// Solves every window at one shared penalty.
inline FrequencyPrecisionSet solve_frequencies(const SmoothedSpectralDensity& sdf, double penalty,
                                               const FourierConfig& config) {
    const int M = sdf.count();
    if (M < 1) throw DataError("spectral density has no windows");
    const Index P = sdf.matrices.front().rows();
    FrequencyPrecisionSet out;
    out.penalty = penalty;
    out.precisions.assign(static_cast<std::size_t>(M), CMatrix());
    std::vector<std::string> errors(static_cast<std::size_t>(M));
    std::vector<double> loglik(static_cast<std::size_t>(M), 0.0);
    out.edge_counts.assign(static_cast<std::size_t>(M), 0);
    parallel_for(
        static_cast<std::size_t>(M),
        [&](std::size_t l) {
            try {
                const CMatrix f = regularize_hpd(sdf.matrices[l], config.regularization);
                auto sol = solve_glasso<Complex>(f, penalty, config.max_iter, config.tol);
                loglik[l] = sdf.window * (log_det_hpd<Complex>(sol.theta) - (f * sol.theta).trace().real());
                out.edge_counts[l] = count_edges(sol.theta);
                out.precisions[l] = std::move(sol.theta);
            } catch (const Error& e) {
                errors[l] = e.what();
            }
        },
        config.threads);
    out.aggregate = Matrix::Zero(P, P);
    for (int l = 0; l < M; ++l) {
        if (!errors[static_cast<std::size_t>(l)].empty()) {
            out.failed.push_back(l);
            continue;
        }
        out.log_likelihood += loglik[static_cast<std::size_t>(l)];
        out.aggregate += out.precisions[static_cast<std::size_t>(l)].cwiseAbs();
    }
    if (out.solved() == 0)
        throw NumericalError("Fourier glasso failed at every frequency (first error: " + errors.front() + ")");
    out.aggregate /= static_cast<double>(out.solved());
    return out;
}

/// Summed criterion over windows, with log(2LM) in place of log(T).
inline double fourier_criterion(const FrequencyPrecisionSet& set, const SmoothedSpectralDensity& sdf,
                                Criterion criterion, double gamma, Index channels) {
    double edges = 0.0;
    for (std::size_t l = 0; l < set.edge_counts.size(); ++l)
        if (set.precisions[l].size() > 0) edges += set.edge_counts[l];
    const double LM = static_cast<double>(sdf.window) * sdf.count();
    switch (criterion) {
        case Criterion::AIC: return -2.0 * set.log_likelihood + 2.0 * LM * edges;
        case Criterion::BIC: return -2.0 * set.log_likelihood + std::log(2.0 * LM) * edges;
        case Criterion::EBIC:
            return -2.0 * set.log_likelihood + std::log(2.0 * LM) * edges +
                   4.0 * gamma * std::log(static_cast<double>(channels)) * edges;
    }
    return 0.0;
}

struct FourierSelection {
    FrequencyPrecisionSet best;
    std::vector<double> grid;  // per-frequency penalties, ascending
    std::vector<CriterionPoint> path;
    bool degenerate = false;
};

/// One penalty shared by all windows, chosen by the summed criterion; the
/// grid runs log-spaced from lambda_ratio * lambda'_sm up to lambda'_sm,
/// the smallest penalty that empties every window. Ties go to the larger penalty.
inline FourierSelection complex_glasso_per_frequency(const SmoothedSpectralDensity& sdf, const FourierConfig& config) {
    config.validate();
    if (sdf.count() < 1) throw DataError("spectral density has no windows");
    const Index P = sdf.matrices.front().rows();
    double sm = 0.0;
    for (const auto& f : sdf.matrices)
        for (Index p = 0; p < P; ++p)
            for (Index q = 0; q < P; ++q)
                if (p != q) sm = std::max(sm, std::abs(f(p, q)));
    FourierSelection sel;
    if (sm == 0.0) {
        sel.degenerate = true;
        sel.best = solve_frequencies(sdf, 0.0, config);
        return sel;
    }
    sel.grid = log_spaced(sm * config.lambda_ratio, sm, config.lambda_points);
    sel.path.resize(sel.grid.size());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = sel.grid.size(); i-- > 0;) {
        FrequencyPrecisionSet set = solve_frequencies(sdf, sel.grid[i], config);
        const double v = fourier_criterion(set, sdf, config.criterion, config.gamma, P);
        int edges = 0;
        for (int e : set.edge_counts) edges += e;
        sel.path[i] = {sel.grid[i] * sdf.window, edges, set.log_likelihood, v};
        if (v < best) {
            best = v;
            sel.best = std::move(set);
        }
    }
    return sel;
}

/// G_pq = 1 iff Qbar_pq >= c.
inline Graph threshold_aggregate(const Matrix& aggregate, double threshold = kSupportThreshold) {
    return support_graph(aggregate, threshold);
}

struct FourierResult {
    Graph graph;
    SmoothedSpectralDensity density;
    FourierSelection selection;
};

inline FourierResult fourier_ts_glasso(const TimeSeries& x, const FourierConfig& config) {
    config.validate();
    if (x.cols() < 1) throw DataError("input has no channels");
    FourierResult out;
    const int m = config.half_window > 0 ? config.half_window : default_half_window(x.rows());
    out.density = smoothed_spectral_matrix(x, m);
    out.selection = complex_glasso_per_frequency(out.density, config);
    out.graph = threshold_aggregate(out.selection.best.aggregate);
    return out;
}

}  // namespace wavecig
