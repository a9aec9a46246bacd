#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "glasso.hpp"
#include "graph.hpp"
#include "parallel.hpp"
#include "spectral.hpp"
#include "surrogate.hpp"
#include "types.hpp"
#include "wavelet.hpp"

namespace wavecig {

struct WavTsGlassoConfig {
    WaveletSpec wavelet = WaveletSpec::haar();
    int bootstraps = 50;
    Criterion criterion = Criterion::EBIC;
    double gamma = 0.5;
    bool exclude_coarsest = true;
    int arity = 2;
    RngSeedPlan seeds{0};
    double regularization = 1e-6;
    int lambda_points = 20;
    int max_iter = 10000;
    double tol = 1e-5;
    unsigned threads = 0;

    void validate() const {
        if (bootstraps < 1) throw ConfigError("bootstrap replicate count R must be >= 1");
        if (arity != 2 && arity != 3) throw ConfigError("similarity arity must be 2 or 3");
        if (gamma < 0.0 || gamma > 1.0) throw ConfigError("eBIC gamma must lie in [0, 1]");
        if (!(regularization > 0.0)) throw ConfigError("regularization floor must be positive");
        if (lambda_points < 1) throw ConfigError("lambda grid needs at least one point");
        if (max_iter < 1 || !(tol > 0.0)) throw ConfigError("solver max_iter and tol must be positive");
    }
};

/// Intermediate products of the per-scale stage.
struct ScaleEstimation {
    std::vector<PrecisionEstimate> estimates;  // estimates[j - 1]
    std::vector<LambdaRange> ranges;
    WaveletSpectrum s_hat_x;
    WaveletSpectrum bootstrap_average;
    Index original_length = 0;
    Index padded_length = 0;
};

/// Glasso with criterion-driven lambda at every scale of an averaged
/// periodogram. Scales are independent and solved concurrently.
inline std::vector<PrecisionEstimate> precisions_from_spectrum(const WaveletSpectrum& averaged, double sample_size,
                                                               const WavTsGlassoConfig& config,
                                                               std::vector<LambdaRange>* ranges = nullptr) {
    const int J = averaged.levels();
    std::vector<PrecisionEstimate> out(static_cast<std::size_t>(J));
    std::vector<LambdaRange> r(static_cast<std::size_t>(J));
    GlassoConfig base;
    base.max_iter = config.max_iter;
    base.tol = config.tol;
    parallel_for(
        out.size(),
        [&](std::size_t i) {
            try {
                LambdaSelection sel = select_lambda(averaged.scales[i], sample_size, config.criterion, config.gamma,
                                                    base, config.lambda_points);
                sel.best.scale = static_cast<int>(i) + 1;
                out[i] = std::move(sel.best);
                r[i] = std::move(sel.range);
            } catch (...) {
                rethrow_with_context("scale " + std::to_string(i + 1) + ": ");
            }
        },
        config.threads);
    if (ranges) *ranges = std::move(r);
    return out;
}

/// ndwt, averaged periodogram, bias correction, surrogate bootstrap, then
/// per-scale glasso. Non-dyadic input is symmetrically padded first.
inline ScaleEstimation estimate_scale_precisions(const TimeSeries& x, const WavTsGlassoConfig& config) {
    config.validate();
    if (x.cols() < 1) throw DataError("input has no channels");
    if (!x.allFinite()) throw DataError("input contains non-finite values");
    ScaleEstimation out;
    out.original_length = x.rows();
    const PaddedSeries padded = symmetric_pad(x);
    const Index T = padded.data.rows();
    out.padded_length = T;
    const int J = log2_exact(T);
    const WaveletFilters filters = build_filters(config.wavelet, J);
    const CircularFilterBank bank(filters, T);
    const AutocorrInnerProduct inner = autocorrelation_inner_product(filters);
    const WaveletSpectrum ibar = time_averaged_periodogram(ndwt_coefficients(padded.data, bank));
    out.s_hat_x = bias_correct(ibar, inner.C_inv, config.regularization);
    const SurrogateSpec spec = surrogate_spectrum(out.s_hat_x, inner.C_inv, filters, config.regularization);
    out.bootstrap_average = bootstrap_average_periodogram(spec, T, config.bootstraps, config.seeds, config.threads);
    out.estimates = precisions_from_spectrum(out.bootstrap_average, static_cast<double>(T), config, &out.ranges);
    return out;
}

struct Similarity {
    int delta = 0;        // shared ordered off-diagonal positions
    double scaled = 0.0;  // delta / (E_a E_b ...)^(1/k)
};

namespace detail {

inline int ordered_support_size(const Matrix& m, double c) {
    int e = 0;
    for (Index p = 0; p < m.rows(); ++p)
        for (Index q = 0; q < m.cols(); ++q)
            if (p != q && std::abs(m(p, q)) >= c) ++e;
    return e;
}

inline Similarity similarity_of(const std::vector<const Matrix*>& ms, double c) {
    const Index P = ms.front()->rows();
    for (const Matrix* m : ms)
        if (m->rows() != P || m->cols() != P) throw DataError("similarity: precision matrices differ in size");
    Similarity s;
    for (Index p = 0; p < P; ++p)
        for (Index q = 0; q < P; ++q) {
            if (p == q) continue;
            bool all = true;
            for (const Matrix* m : ms) all = all && std::abs((*m)(p, q)) >= c;
            if (all) ++s.delta;
        }
    double denom = 1.0;
    for (const Matrix* m : ms) {
        const int e = ordered_support_size(*m, c);
        if (e == 0) return {s.delta, 0.0};
        denom *= std::pow(static_cast<double>(e), 1.0 / static_cast<double>(ms.size()));
    }
    s.scaled = s.delta / denom;
    return s;
}

}  // namespace detail

inline Similarity similarity(const Matrix& a, const Matrix& b, double threshold = kSupportThreshold) {
    return detail::similarity_of({&a, &b}, threshold);
}

inline Similarity similarity3(const Matrix& a, const Matrix& b, const Matrix& c,
                              double threshold = kSupportThreshold) {
    return detail::similarity_of({&a, &b, &c}, threshold);
}

struct ScaleSelection {
    std::vector<int> scales;  // selected scales, ascending, 1-based
    double score = 0.0;
    bool fallback = false;
    Matrix table;  // pairwise scaled similarity, J x J
};

/// Maximizes the scaled similarity over eligible scale tuples. Ties go to
/// the finer tuple: smaller index sum, then lexicographically smaller.
inline ScaleSelection select_scale_pair(const std::vector<PrecisionEstimate>& estimates,
                                        const WavTsGlassoConfig& config) {
    const int J = static_cast<int>(estimates.size());
    const int eligible = config.exclude_coarsest ? J - 1 : J;
    if (eligible < config.arity)
        throw DataError("scale selection needs at least " + std::to_string(config.arity) +
                        " eligible scales but only " + std::to_string(std::max(eligible, 0)) +
                        " are available; use a longer series");
    ScaleSelection sel;
    sel.table = Matrix::Zero(J, J);
    for (int a = 0; a < J; ++a)
        for (int b = a; b < J; ++b) {
            const double v = similarity(estimates[a].theta, estimates[b].theta).scaled;
            sel.table(a, b) = v;
            sel.table(b, a) = v;
        }
    constexpr double tie = 1e-12;
    double best = 0.0;
    int best_sum = 0;
    auto consider = [&](std::vector<int> tuple, double v) {
        int sum = 0;
        for (int t : tuple) sum += t;
        if (v <= 0.0) return;
        if (sel.scales.empty() || v > best + tie || (v > best - tie && sum < best_sum)) {
            best = v;
            best_sum = sum;
            sel.scales = std::move(tuple);
        }
    };
    if (config.arity == 2) {
        for (int a = 1; a <= eligible; ++a)
            for (int b = a + 1; b <= eligible; ++b) consider({a, b}, sel.table(a - 1, b - 1));
    } else {
        for (int a = 1; a <= eligible; ++a)
            for (int b = a + 1; b <= eligible; ++b)
                for (int c = b + 1; c <= eligible; ++c)
                    consider({a, b, c},
                             similarity3(estimates[a - 1].theta, estimates[b - 1].theta, estimates[c - 1].theta)
                                 .scaled);
    }
    if (sel.scales.empty()) {
        sel.fallback = true;
        for (int j = 1; j <= config.arity; ++j) sel.scales.push_back(j);
        sel.score = 0.0;
    } else {
        sel.score = best;
    }
    return sel;
}

struct WavTsGlassoResult {
    Graph graph;
    std::vector<PrecisionEstimate> estimates;
    std::vector<LambdaRange> ranges;
    ScaleSelection selection;
    Index original_length = 0;
    Index padded_length = 0;
};

/// Union of the thresholded supports of the selected scales.
inline Graph combine_supports(const std::vector<PrecisionEstimate>& estimates, const std::vector<int>& scales) {
    Graph g(static_cast<int>(estimates.front().theta.rows()));
    for (int j : scales) g = g.united(support_graph(estimates.at(static_cast<std::size_t>(j - 1)).theta));
    return g;
}

inline WavTsGlassoResult aggregate_scales(std::vector<PrecisionEstimate> estimates, const WavTsGlassoConfig& config) {
    WavTsGlassoResult out;
    out.selection = select_scale_pair(estimates, config);
    out.graph = combine_supports(estimates, out.selection.scales);
    out.estimates = std::move(estimates);
    return out;
}

/// Everything downstream of the bootstrap: deterministic in its input.
inline WavTsGlassoResult wav_ts_glasso_from_spectrum(const WaveletSpectrum& averaged, double sample_size,
                                                     const WavTsGlassoConfig& config) {
    config.validate();
    std::vector<LambdaRange> ranges;
    auto estimates = precisions_from_spectrum(averaged, sample_size, config, &ranges);
    WavTsGlassoResult out = aggregate_scales(std::move(estimates), config);
    out.ranges = std::move(ranges);
    return out;
}

inline WavTsGlassoResult wav_ts_glasso(const TimeSeries& x, const WavTsGlassoConfig& config) {
    ScaleEstimation stage = estimate_scale_precisions(x, config);
    WavTsGlassoResult out = aggregate_scales(std::move(stage.estimates), config);
    out.ranges = std::move(stage.ranges);
    out.original_length = stage.original_length;
    out.padded_length = stage.padded_length;
    return out;
}

}  // namespace wavecig
