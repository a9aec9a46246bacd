#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <type_traits>
#include <vector>

#include "types.hpp"

namespace wavecig {

enum class Criterion { AIC, BIC, EBIC };

inline Criterion parse_criterion(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "aic") return Criterion::AIC;
    if (s == "bic") return Criterion::BIC;
    if (s == "ebic") return Criterion::EBIC;
    throw ConfigError("unknown information criterion '" + s + "' (expected aic, bic or ebic)");
}

inline std::string criterion_name(Criterion c) {
    switch (c) {
        case Criterion::AIC: return "aic";
        case Criterion::BIC: return "bic";
        case Criterion::EBIC: return "ebic";
    }
    return "?";
}

/// Off-diagonal l1 penalized Gaussian likelihood. `lambda` is on the
/// likelihood's sample-size scale; the per-observation penalty solved for is
/// lambda / sample_size.
struct GlassoConfig {
    double lambda = 0.0;
    double sample_size = 1.0;
    int max_iter = 10000;
    double tol = 1e-5;

    double penalty() const { return lambda / sample_size; }
};

namespace detail {

inline double conj_of(double x) { return x; }
inline Complex conj_of(const Complex& x) { return std::conj(x); }
inline double real_of(double x) { return x; }
inline double real_of(const Complex& x) { return x.real(); }

/// z * max(0, 1 - rho / |z|): scalar soft threshold for reals, modulus
/// shrinkage for complex numbers.
template <class Scalar>
Scalar soft_threshold(const Scalar& z, double rho) {
    const double mag = std::abs(z);
    if (mag <= rho) return Scalar(0);
    return z * ((mag - rho) / mag);
}

}  // namespace detail

template <class Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
struct GlassoSolution {
    DenseMatrix<Scalar> theta;       // sparse precision estimate
    DenseMatrix<Scalar> covariance;  // W, the matching covariance estimate
    int sweeps = 0;
    /// -log det W after each sweep; non-increasing for an exact column solver.
    std::vector<double> dual_objective;
};

template <class Scalar>
double log_det_hpd(const DenseMatrix<Scalar>& m) {
    Eigen::LLT<DenseMatrix<Scalar>> llt(m);
    if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
    double s = 0.0;
    const auto& l = llt.matrixLLT();
    for (Index i = 0; i < m.rows(); ++i) s += std::log(detail::real_of(l(i, i)));
    return 2.0 * s;
}

/// Largest KKT residual of the off-diagonal l1 problem at `theta`:
/// zeros need |(S - Theta^-1)_pq| <= rho, nonzeros need
/// (S - Theta^-1)_pq = -rho * Theta_pq / |Theta_pq|, diagonals need equality.
/// Returns the worst excess over those conditions.
template <class Scalar>
double kkt_violation(const DenseMatrix<Scalar>& s, const DenseMatrix<Scalar>& theta, double rho) {
    const DenseMatrix<Scalar> w = theta.inverse();
    double worst = 0.0;
    for (Index p = 0; p < s.rows(); ++p) {
        for (Index q = 0; q < s.cols(); ++q) {
            const Scalar g = s(p, q) - w(p, q);
            double v;
            if (p == q) {
                v = std::abs(g);
            } else if (theta(p, q) == Scalar(0)) {
                v = std::max(0.0, std::abs(g) - rho);
            } else {
                const Scalar sign = theta(p, q) / std::abs(theta(p, q));
                v = std::abs(g + rho * sign);
            }
            worst = std::max(worst, v);
        }
    }
    return worst;
}

/// -log det Theta + tr(S Theta) + rho * sum_{p != q} |Theta_pq|.
template <class Scalar>
double primal_objective(const DenseMatrix<Scalar>& s, const DenseMatrix<Scalar>& theta, double rho) {
    double penalty = 0.0;
    for (Index p = 0; p < theta.rows(); ++p)
        for (Index q = 0; q < theta.cols(); ++q)
            if (p != q) penalty += std::abs(theta(p, q));
    return -log_det_hpd<Scalar>(theta) + detail::real_of((s * theta).trace()) + rho * penalty;
}

/// Block coordinate descent (the classical graphical-lasso scheme) with a
/// coordinate-descent lasso for each column. Works for real symmetric and
/// complex Hermitian input; the diagonal is never penalized.
template <class Scalar>
GlassoSolution<Scalar> solve_glasso(const DenseMatrix<Scalar>& s, double rho, int max_iter = 10000,
                                    double tol = 1e-5) {
    using Mat = DenseMatrix<Scalar>;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const Index P = s.rows();
    if (s.cols() != P) throw DataError("glasso: input matrix must be square");
    if (!(rho >= 0.0) || !std::isfinite(rho)) throw ConfigError("glasso: penalty must be finite and >= 0");
    if (!(tol > 0.0)) throw ConfigError("glasso: tolerance must be positive");
    if (!s.allFinite()) throw DataError("glasso: input contains non-finite values");
    {
        Eigen::LLT<Mat> llt(s);
        if (llt.info() != Eigen::Success)
            throw NumericalError("glasso: input is not positive definite; regularize it first");
    }
    GlassoSolution<Scalar> out;
    if (P == 1) {
        out.theta = Mat::Constant(1, 1, Scalar(1.0 / detail::real_of(s(0, 0))));
        out.covariance = s;
        return out;
    }

    Mat w = s;
    Mat beta = Mat::Zero(P, P);  // column j holds the lasso coefficients for node j
    std::vector<Index> others(static_cast<std::size_t>(P - 1));
    Mat w11(P - 1, P - 1);
    Vec s12(P - 1), b(P - 1), g(P - 1);

    double off_scale = 0.0;
    for (Index p = 0; p < P; ++p)
        for (Index q = 0; q < P; ++q)
            if (p != q) off_scale += std::abs(s(p, q));
    off_scale = std::max(off_scale / static_cast<double>(P * (P - 1)), 1e-12);

    auto build_theta = [&]() {
        Mat theta = Mat::Zero(P, P);
        for (Index j = 0; j < P; ++j) {
            Index c = 0;
            for (Index i = 0; i < P; ++i)
                if (i != j) others[static_cast<std::size_t>(c++)] = i;
            Scalar wb(0);
            for (Index k = 0; k < P - 1; ++k)
                wb += detail::conj_of(w(others[k], j)) * beta(others[k], j);
            const double t22 = 1.0 / detail::real_of(w(j, j) - wb);
            theta(j, j) = Scalar(t22);
            for (Index k = 0; k < P - 1; ++k) theta(others[k], j) = -beta(others[k], j) * t22;
        }
        Mat sym = 0.5 * (theta + theta.adjoint());
        for (Index p = 0; p < P; ++p)
            for (Index q = 0; q < P; ++q)
                if (p != q && (theta(p, q) == Scalar(0) || theta(q, p) == Scalar(0))) sym(p, q) = Scalar(0);
        return sym;
    };

    const double inner_tol = 1e-12;
    double last_change = std::numeric_limits<double>::infinity();
    for (int sweep = 1; sweep <= max_iter; ++sweep) {
        double change = 0.0;
        for (Index j = 0; j < P; ++j) {
            Index c = 0;
            for (Index i = 0; i < P; ++i)
                if (i != j) others[static_cast<std::size_t>(c++)] = i;
            for (Index a = 0; a < P - 1; ++a) {
                s12(a) = s(others[a], j);
                b(a) = beta(others[a], j);
                for (Index bb = 0; bb < P - 1; ++bb) w11(a, bb) = w(others[a], others[bb]);
            }
            g.noalias() = w11 * b;
            for (int it = 0; it < 100000; ++it) {
                double delta_max = 0.0;
                double scale = 0.0;
                for (Index k = 0; k < P - 1; ++k) {
                    const double wkk = detail::real_of(w11(k, k));
                    const Scalar r = s12(k) - (g(k) - w11(k, k) * b(k));
                    const Scalar nb = detail::soft_threshold(r, rho) / wkk;
                    const Scalar d = nb - b(k);
                    if (d != Scalar(0)) {
                        g += w11.col(k) * d;
                        b(k) = nb;
                    }
                    delta_max = std::max(delta_max, std::abs(d));
                    scale = std::max(scale, std::abs(nb));
                }
                if (delta_max <= inner_tol * std::max(1.0, scale)) break;
            }
            g.noalias() = w11 * b;
            for (Index a = 0; a < P - 1; ++a) {
                change += std::abs(g(a) - w(others[a], j));
                beta(others[a], j) = b(a);
                w(others[a], j) = g(a);
                w(j, others[a]) = detail::conj_of(g(a));
            }
        }
        out.sweeps = sweep;
        out.dual_objective.push_back(-log_det_hpd<Scalar>(w));
        last_change = change / static_cast<double>(P * (P - 1));
        if (last_change < tol * off_scale * 1e-3 || last_change == 0.0) {
            Mat theta = build_theta();
            if (kkt_violation<Scalar>(s, theta, rho) <= 0.1 * tol) {
                out.theta = std::move(theta);
                out.covariance = w;
                return out;
            }
        }
    }
    throw NumericalError("glasso: no convergence after " + std::to_string(max_iter) +
                         " sweeps (mean absolute change " + std::to_string(last_change) + ", penalty " +
                         std::to_string(rho) + ")");
}

/// Unordered off-diagonal pairs with |Theta_pq| >= threshold.
template <class Derived>
int count_edges(const Eigen::MatrixBase<Derived>& theta, double threshold = kSupportThreshold) {
    int e = 0;
    for (Index p = 0; p < theta.rows(); ++p)
        for (Index q = p + 1; q < theta.cols(); ++q)
            if (std::abs(theta(p, q)) >= threshold) ++e;
    return e;
}

struct PrecisionEstimate {
    Matrix theta;
    Matrix covariance;
    double lambda = 0.0;   // on the sample-size scale
    double penalty = 0.0;  // lambda / T
    int scale = 0;         // wavelet scale j, 0 when not applicable
    int edge_count = 0;
    double log_likelihood = 0.0;  // T [log det Theta - tr(S Theta)]
    int sweeps = 0;
};

inline double gaussian_log_likelihood(const Matrix& s, const Matrix& theta, double sample_size) {
    return sample_size * (log_det_hpd<double>(theta) - (s * theta).trace());
}

inline PrecisionEstimate graphical_lasso(const Matrix& s, const GlassoConfig& config) {
    if (!(config.sample_size > 0.0)) throw ConfigError("glasso: sample size must be positive");
    if (!(config.lambda >= 0.0)) throw ConfigError("glasso: lambda must be >= 0");
    auto sol = solve_glasso<double>(s, config.penalty(), config.max_iter, config.tol);
    PrecisionEstimate est;
    est.theta = std::move(sol.theta);
    est.covariance = std::move(sol.covariance);
    est.lambda = config.lambda;
    est.penalty = config.penalty();
    est.edge_count = count_edges(est.theta);
    est.log_likelihood = gaussian_log_likelihood(s, est.theta, config.sample_size);
    est.sweeps = sol.sweeps;
    return est;
}

/// Diagonal solution, the estimate for any penalty at or above the no-edge threshold.
inline PrecisionEstimate diagonal_estimate(const Matrix& s, double sample_size) {
    PrecisionEstimate est;
    est.theta = Matrix::Zero(s.rows(), s.cols());
    est.covariance = Matrix::Zero(s.rows(), s.cols());
    for (Index p = 0; p < s.rows(); ++p) {
        est.theta(p, p) = 1.0 / s(p, p);
        est.covariance(p, p) = s(p, p);
    }
    est.log_likelihood = gaussian_log_likelihood(s, est.theta, sample_size);
    return est;
}

struct LambdaRange {
    double smallest_empty = 0.0;  // lambda_sm: smallest lambda giving no edges
    double lower = 0.0;
    double upper = 0.0;
    std::vector<double> grid;  // ascending
    bool degenerate = false;   // no off-diagonal signal at all
};

inline std::vector<double> log_spaced(double lo, double hi, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    if (n == 1) {
        out[0] = hi;
        return out;
    }
    const double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

/// lambda_sm = T max_{p != q} |S_pq|, lambda_u = lambda_sm / 3,
/// lambda_l = lambda_u / 10, and `points` log-spaced values in between.
inline LambdaRange lambda_range(const Matrix& s, double sample_size, int points = 20) {
    double m = 0.0;
    for (Index p = 0; p < s.rows(); ++p)
        for (Index q = 0; q < s.cols(); ++q)
            if (p != q) m = std::max(m, std::abs(s(p, q)));
    LambdaRange r;
    r.smallest_empty = sample_size * m;
    if (m == 0.0) {
        r.degenerate = true;
        return r;
    }
    r.upper = r.smallest_empty / 3.0;
    r.lower = r.upper / 10.0;
    r.grid = log_spaced(r.lower, r.upper, points);
    return r;
}

/// AIC/BIC/eBIC with the edge count inflated to E* = T E.
inline double information_criterion(Criterion c, double log_likelihood, int edges, double sample_size,
                                    Index channels, double gamma) {
    const double e_star = sample_size * edges;
    switch (c) {
        case Criterion::AIC: return -2.0 * log_likelihood + 2.0 * e_star;
        case Criterion::BIC: return -2.0 * log_likelihood + std::log(sample_size) * e_star;
        case Criterion::EBIC:
            return -2.0 * log_likelihood + std::log(sample_size) * e_star +
                   4.0 * gamma * std::log(static_cast<double>(channels)) * e_star;
    }
    return 0.0;
}

struct CriterionPoint {
    double lambda = 0.0;
    int edges = 0;
    double log_likelihood = 0.0;
    double value = 0.0;
};

struct LambdaSelection {
    PrecisionEstimate best;
    LambdaRange range;
    std::vector<CriterionPoint> path;  // ascending lambda
};

/// Scans the lambda grid and keeps the criterion minimizer; ties go to the
/// larger lambda.
inline LambdaSelection select_lambda(const Matrix& s, double sample_size, Criterion criterion, double gamma,
                                     const GlassoConfig& base = {}, int grid_points = 20) {
    if (gamma < 0.0 || gamma > 1.0) throw ConfigError("eBIC gamma must lie in [0, 1]");
    LambdaSelection sel;
    sel.range = lambda_range(s, sample_size, grid_points);
    if (sel.range.degenerate) {
        sel.best = diagonal_estimate(s, sample_size);
        return sel;
    }
    sel.path.resize(sel.range.grid.size());
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t i = sel.range.grid.size(); i-- > 0;) {
        GlassoConfig cfg = base;
        cfg.lambda = sel.range.grid[i];
        cfg.sample_size = sample_size;
        PrecisionEstimate est = graphical_lasso(s, cfg);
        const double value =
            information_criterion(criterion, est.log_likelihood, est.edge_count, sample_size, s.rows(), gamma);
        sel.path[i] = {cfg.lambda, est.edge_count, est.log_likelihood, value};
        if (value < best_value) {
            best_value = value;
            sel.best = std::move(est);
        }
    }
    return sel;
}

}  // namespace wavecig
