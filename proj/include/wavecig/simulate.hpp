#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "graph.hpp"
#include "parallel.hpp"
#include "types.hpp"
#include "wavelet.hpp"

namespace wavecig {

inline constexpr int kDefaultBurnIn = 500;

/// Each unordered pair (p < q, row-major order) joins with probability rho.
inline Graph erdos_renyi(int P, double rho, std::uint64_t seed) {
    if (P < 2) throw ConfigError("graph needs at least 2 nodes");
    if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("edge probability must lie in [0, 1]");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Graph g(P);
    for (int p = 0; p < P; ++p)
        for (int q = p + 1; q < P; ++q)
            if (u(rng) < rho) g.add_edge(p, q);
    return g;
}

/// i <-> i + 1 mod P.
inline Graph ring_graph(int P) {
    if (P < 2) throw ConfigError("graph needs at least 2 nodes");
    Graph g(P);
    for (int i = 0; i < P; ++i)
        if ((i + 1) % P != i) g.add_edge(i, (i + 1) % P);
    return g;
}

inline Graph complete_graph(int P) {
    Graph g(P);
    for (int p = 0; p < P; ++p)
        for (int q = p + 1; q < P; ++q) g.add_edge(p, q);
    return g;
}

/// "ring:P", "er:P:rho:seed" or "complete:P".
inline Graph parse_graph_spec(const std::string& spec) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const auto colon = spec.find(':', start);
        parts.push_back(spec.substr(start, colon - start));
        if (colon == std::string::npos) break;
        start = colon + 1;
    }
    try {
        if (parts[0] == "ring" && parts.size() == 2) return ring_graph(std::stoi(parts[1]));
        if (parts[0] == "complete" && parts.size() == 2) return complete_graph(std::stoi(parts[1]));
        if ((parts[0] == "er" || parts[0] == "erdos_renyi") && (parts.size() == 3 || parts.size() == 4))
            return erdos_renyi(std::stoi(parts[1]), std::stod(parts[2]),
                               parts.size() == 4 ? std::stoull(parts[3]) : 0);
    } catch (const std::logic_error&) {
    }
    throw ConfigError("bad graph spec '" + spec + "' (expected ring:P, complete:P or er:P:rho[:seed])");
}

/// Shortest-path distances between all node pairs; -1 when unreachable.
inline std::vector<std::vector<int>> all_pairs_distances(const Graph& g) {
    std::vector<std::vector<int>> d;
    d.reserve(static_cast<std::size_t>(g.node_count()));
    for (int p = 0; p < g.node_count(); ++p) d.push_back(bfs_distances(g, p));
    return d;
}

/// W^(r): row i spreads weight 1/|N_r(i)| over nodes at distance exactly r.
inline Matrix stage_weights(const Graph& g, int r) {
    if (r < 1) throw ConfigError("neighbour stage must be >= 1");
    const int P = g.node_count();
    const auto d = all_pairs_distances(g);
    Matrix w = Matrix::Zero(P, P);
    for (int i = 0; i < P; ++i) {
        int n = 0;
        for (int k = 0; k < P; ++k) n += d[i][k] == r;
        if (n == 0) continue;
        for (int k = 0; k < P; ++k)
            if (d[i][k] == r) w(i, k) = 1.0 / n;
    }
    return w;
}

struct VarmaModel {
    std::vector<Matrix> ar;  // A_1 .. A_p
    std::vector<Matrix> ma;  // B_1 .. B_q
    Matrix noise_cov;

    Index channels() const { return noise_cov.rows(); }
};

struct GnarModel {
    Graph graph;
    std::vector<int> stages;                // s_l for l = 1..p
    Matrix alpha;                           // p x P
    std::vector<std::vector<double>> beta;  // beta[l-1][r-1]

    int order() const { return static_cast<int>(stages.size()); }

    /// A_l = diag(alpha_l) + sum_r beta_{l,r} W^(r).
    std::vector<Matrix> coefficient_matrices() const {
        const int P = graph.node_count();
        if (alpha.rows() != order() || alpha.cols() != P || static_cast<int>(beta.size()) != order())
            throw ConfigError("GNAR parameter shapes do not match the lag order and node count");
        int max_stage = 0;
        for (int s : stages) max_stage = std::max(max_stage, s);
        std::vector<Matrix> w;
        for (int r = 1; r <= max_stage; ++r) w.push_back(stage_weights(graph, r));
        std::vector<Matrix> a;
        for (int l = 0; l < order(); ++l) {
            if (static_cast<int>(beta[l].size()) != stages[l])
                throw ConfigError("GNAR lag " + std::to_string(l + 1) + " needs " + std::to_string(stages[l]) +
                                  " stage coefficients");
            Matrix m = alpha.row(l).transpose().asDiagonal();
            for (int r = 0; r < stages[l]; ++r) m += beta[l][r] * w[r];
            a.push_back(std::move(m));
        }
        return a;
    }

    VarmaModel as_var() const {
        return {coefficient_matrices(), {}, Matrix::Identity(graph.node_count(), graph.node_count())};
    }
};

/// GNAR(1,[1]) with a common alpha and beta.
inline GnarModel gnar_1_1(const Graph& g, double beta, double alpha = 0.0) {
    GnarModel m;
    m.graph = g;
    m.stages = {1};
    m.alpha = Matrix::Constant(1, g.node_count(), alpha);
    m.beta = {{beta}};
    return m;
}

/// Spectral radius of the VAR companion matrix.
inline double companion_radius(const std::vector<Matrix>& ar) {
    if (ar.empty()) return 0.0;
    const Index P = ar.front().rows();
    const Index p = static_cast<Index>(ar.size());
    Matrix c = Matrix::Zero(P * p, P * p);
    for (Index l = 0; l < p; ++l) c.block(0, l * P, P, P) = ar[static_cast<std::size_t>(l)];
    if (p > 1) c.block(P, 0, P * (p - 1), P * (p - 1)).setIdentity();
    Eigen::EigenSolver<Matrix> eig(c, false);
    return eig.eigenvalues().cwiseAbs().maxCoeff();
}

inline void check_varma(const VarmaModel& m) {
    const Index P = m.channels();
    if (P < 1 || m.noise_cov.cols() != P) throw ConfigError("noise covariance must be square and nonempty");
    for (const auto& a : m.ar)
        if (a.rows() != P || a.cols() != P) throw ConfigError("AR coefficient has the wrong shape");
    for (const auto& b : m.ma)
        if (b.rows() != P || b.cols() != P) throw ConfigError("MA coefficient has the wrong shape");
    const double rho = companion_radius(m.ar);
    if (!(rho < 1.0))
        throw ConfigError("model is not stationary: companion spectral radius " + std::to_string(rho) + " >= 1");
    Eigen::LLT<Matrix> llt(m.noise_cov);
    if (llt.info() != Eigen::Success) throw ConfigError("noise covariance is not positive definite");
}

/// X_t = sum_l A_l X_{t-l} + e_t + sum_m B_m e_{t-m}, e_t ~ N(0, Sigma), from
/// a zero start with `burn_in` leading samples discarded.
inline TimeSeries simulate_varma(const VarmaModel& m, Index T, std::uint64_t seed, int burn_in = kDefaultBurnIn) {
    check_varma(m);
    if (T < 1) throw ConfigError("series length must be positive");
    if (burn_in < 0) throw ConfigError("burn-in must be >= 0");
    const Index P = m.channels();
    const Matrix L = m.noise_cov.llt().matrixL();
    const Index n = T + burn_in;
    const Index p = static_cast<Index>(m.ar.size());
    const Index q = static_cast<Index>(m.ma.size());
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Matrix x = Matrix::Zero(P, n);
    Matrix e = Matrix::Zero(P, n);
    Vector z(P);
    for (Index t = 0; t < n; ++t) {
        for (Index i = 0; i < P; ++i) z(i) = normal(rng);
        e.col(t) = L * z;
        Vector v = e.col(t);
        for (Index l = 1; l <= p && l <= t; ++l) v.noalias() += m.ar[static_cast<std::size_t>(l - 1)] * x.col(t - l);
        for (Index k = 1; k <= q && k <= t; ++k) v.noalias() += m.ma[static_cast<std::size_t>(k - 1)] * e.col(t - k);
        x.col(t) = v;
    }
    return x.rightCols(T).transpose();
}

inline TimeSeries simulate_var(const Matrix& a, const Matrix& noise_cov, Index T, std::uint64_t seed,
                               int burn_in = kDefaultBurnIn) {
    return simulate_varma({{a}, {}, noise_cov}, T, seed, burn_in);
}

inline TimeSeries simulate_gnar(const GnarModel& model, Index T, std::uint64_t seed, int burn_in = kDefaultBurnIn) {
    return simulate_varma(model.as_var(), T, seed, burn_in);
}

/// Ring VAR(1) whose row i carries beta_i / 2 on both ring neighbours, the
/// GNAR(1,[1]) ring model with node-specific network coefficients.
inline Matrix ring_var_coefficients(const std::vector<double>& beta) {
    const int P = static_cast<int>(beta.size());
    const Graph ring = ring_graph(P);
    const Matrix w = stage_weights(ring, 1);
    Matrix a(P, P);
    for (int i = 0; i < P; ++i) a.row(i) = beta[static_cast<std::size_t>(i)] * w.row(i);
    return a;
}

/// beta_i ~ U(lo, hi) independently.
inline VarmaModel ring_var_model(int P, double lo, double hi, std::uint64_t seed) {
    if (!(lo < hi)) throw ConfigError("beta interval must have lo < hi");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> beta(static_cast<std::size_t>(P));
    for (auto& b : beta) b = u(rng);
    return {{ring_var_coefficients(beta)}, {}, Matrix::Identity(P, P)};
}

/// A = 0.5 I; noise precision off-diagonals 0 or 0.5 with equal odds, then the
/// diagonal raised by |lambda_min| + 0.1.
inline VarmaModel noise_precision_var_model(int P, std::uint64_t seed, Matrix* precision = nullptr) {
    if (P < 2) throw ConfigError("graph needs at least 2 nodes");
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    Matrix k = Matrix::Zero(P, P);
    for (int p = 0; p < P; ++p)
        for (int q = p + 1; q < P; ++q)
            if (coin(rng)) k(p, q) = k(q, p) = 0.5;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(k, Eigen::EigenvaluesOnly);
    k.diagonal().array() += std::abs(eig.eigenvalues().minCoeff()) + 0.1;
    if (precision) *precision = k;
    return {{0.5 * Matrix::Identity(P, P)}, {}, k.inverse()};
}

/// Block-diagonal VARMA(2,2): A1 = 0.4 I, A2 = 0.2 I, B1 and B2 made of
/// 1.5 (I + J) and 0.75 (I + J) blocks.
inline VarmaModel block_varma_model(int blocks = 4, int block_size = 5) {
    const int P = blocks * block_size;
    const Matrix ij = Matrix::Identity(block_size, block_size) + Matrix::Ones(block_size, block_size);
    Matrix b1 = Matrix::Zero(P, P), b2 = Matrix::Zero(P, P);
    for (int b = 0; b < blocks; ++b) {
        b1.block(b * block_size, b * block_size, block_size, block_size) = 1.5 * ij;
        b2.block(b * block_size, b * block_size, block_size, block_size) = 0.75 * ij;
    }
    return {{0.4 * Matrix::Identity(P, P), 0.2 * Matrix::Identity(P, P)}, {b1, b2}, Matrix::Identity(P, P)};
}

inline Graph block_graph(int blocks = 4, int block_size = 5) {
    Graph g(blocks * block_size);
    for (int b = 0; b < blocks; ++b)
        for (int i = 0; i < block_size; ++i)
            for (int k = i + 1; k < block_size; ++k) g.add_edge(b * block_size + i, b * block_size + k);
    return g;
}

/// Pairs within twice the largest stage of each other.
inline Graph true_cig_gnar(const Graph& g, const std::vector<int>& stages) {
    int s = 0;
    for (int v : stages) s = std::max(s, v);
    const auto d = all_pairs_distances(g);
    Graph cig(g.node_count());
    for (int p = 0; p < g.node_count(); ++p)
        for (int q = p + 1; q < g.node_count(); ++q)
            if (d[p][q] > 0 && d[p][q] <= 2 * s) cig.add_edge(p, q);
    return cig;
}

/// f(w) = H(w) Sigma H(w)^H with H(w) = (I - sum_l A_l z^l)^-1 (I + sum_m B_m z^m), z = exp(-2 pi i w).
inline CMatrix spectral_density(const VarmaModel& m, double omega) {
    const Index P = m.channels();
    const Complex z = std::polar(1.0, -2.0 * std::numbers::pi * omega);
    CMatrix a = CMatrix::Identity(P, P), b = CMatrix::Identity(P, P);
    Complex zl = 1.0;
    for (const auto& al : m.ar) {
        zl *= z;
        a -= zl * al.cast<Complex>();
    }
    zl = 1.0;
    for (const auto& bm : m.ma) {
        zl *= z;
        b += zl * bm.cast<Complex>();
    }
    Eigen::PartialPivLU<CMatrix> lu(a);
    if (!(lu.rcond() > 1e-14))
        throw NumericalError("transfer function is singular at frequency " + std::to_string(omega));
    const CMatrix h = lu.solve(b);
    return h * m.noise_cov.cast<Complex>() * h.adjoint();
}

struct SpectralOracle {
    std::vector<double> frequencies;
    std::vector<CMatrix> density;
    Matrix max_inverse;  // max over the grid of |f^-1(w)_pq|
    Graph graph;
};

/// CIG from zeros of the inverse spectral density over an even grid on [0, 1).
inline SpectralOracle spectral_oracle_var(const VarmaModel& m, int grid = 512, double zero_tol = 1e-8) {
    check_varma(m);
    if (grid < 1) throw ConfigError("frequency grid must be nonempty");
    const Index P = m.channels();
    SpectralOracle out;
    out.max_inverse = Matrix::Zero(P, P);
    for (int k = 0; k < grid; ++k) {
        const double w = static_cast<double>(k) / grid;
        CMatrix f = spectral_density(m, w);
        Eigen::PartialPivLU<CMatrix> lu(f);
        if (!(lu.rcond() > 1e-14))
            throw NumericalError("spectral density is singular at frequency " + std::to_string(w));
        const CMatrix inv = lu.inverse();
        out.max_inverse = out.max_inverse.cwiseMax(inv.cwiseAbs());
        out.frequencies.push_back(w);
        out.density.push_back(std::move(f));
    }
    out.graph = support_graph(out.max_inverse, zero_tol);
    return out;
}

/// Gamma(tau) = Cov(X_{t+tau}, X_t) for tau = 0..max_lag, by inverse DFT of f
/// on a grid of `grid` points.
inline std::vector<Matrix> autocovariances(const VarmaModel& m, Index max_lag, int grid = 16384) {
    check_varma(m);
    const Index P = m.channels();
    std::vector<CMatrix> f(static_cast<std::size_t>(grid));
    for (int k = 0; k < grid; ++k) f[static_cast<std::size_t>(k)] = spectral_density(m, static_cast<double>(k) / grid);
    std::vector<Matrix> out(static_cast<std::size_t>(max_lag + 1), Matrix(P, P));
    Eigen::FFT<double> fft;
    std::vector<Complex> series(static_cast<std::size_t>(grid)), lags;
    for (Index p = 0; p < P; ++p)
        for (Index q = 0; q < P; ++q) {
            for (int k = 0; k < grid; ++k) series[static_cast<std::size_t>(k)] = f[static_cast<std::size_t>(k)](p, q);
            fft.inv(lags, series);
            for (Index tau = 0; tau <= max_lag; ++tau)
                out[static_cast<std::size_t>(tau)](p, q) = lags[static_cast<std::size_t>(tau % grid)].real();
        }
    return out;
}

/// Per-scale wavelet spectrum implied by a stationary model:
/// beta_j = sum_tau Psi_j(tau) Gamma(tau), then S = C^-1 beta.
inline std::vector<Matrix> model_wavelet_spectrum(const VarmaModel& m, const AutocorrInnerProduct& inner,
                                                  int grid = 16384) {
    const int J = inner.levels();
    Index lag = 0;
    for (int j = 1; j <= J; ++j) lag = std::max(lag, inner.max_lag(j));
    lag = std::min<Index>(lag, grid / 2 - 1);
    const auto gamma = autocovariances(m, lag, grid);
    const Index P = m.channels();
    std::vector<Matrix> beta(static_cast<std::size_t>(J), Matrix::Zero(P, P));
    for (int j = 1; j <= J; ++j) {
        Matrix& b = beta[static_cast<std::size_t>(j - 1)];
        b = inner.psi(j, 0) * gamma[0];
        for (Index tau = 1; tau <= std::min(inner.max_lag(j), lag); ++tau)
            b += inner.psi(j, tau) * (gamma[static_cast<std::size_t>(tau)] + gamma[static_cast<std::size_t>(tau)].transpose());
    }
    std::vector<Matrix> s(static_cast<std::size_t>(J), Matrix::Zero(P, P));
    for (int j = 0; j < J; ++j)
        for (int l = 0; l < J; ++l) s[static_cast<std::size_t>(j)] += inner.C_inv(j, l) * beta[static_cast<std::size_t>(l)];
    return s;
}

}  // namespace wavecig
