#include <gtest/gtest.h>

#include <random>

#include <wavecig/fourier.hpp>
#include <wavecig/metrics.hpp>
#include <wavecig/simulate.hpp>

using namespace wavecig;

namespace {

TimeSeries white_noise(Index T, Index P, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n;
    TimeSeries x(T, P);
    for (Index t = 0; t < T; ++t)
        for (Index p = 0; p < P; ++p) x(t, p) = n(rng);
    return x;
}

CMatrix random_hpd(Index P, std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    CMatrix a(P, P);
    for (Index i = 0; i < P; ++i)
        for (Index k = 0; k < P; ++k) a(i, k) = Complex(n(rng), n(rng));
    return a * a.adjoint() / static_cast<double>(P) + CMatrix::Identity(P, P);
}

}  // namespace

TEST(SmoothedSpectralMatrix, WindowArithmetic) {
    EXPECT_EQ(window_count(256, 8), 7);
    const auto sdf = smoothed_spectral_matrix(white_noise(256, 2, 1), 8);
    EXPECT_EQ(sdf.window, 17);
    EXPECT_EQ(sdf.count(), 7);
    EXPECT_EQ(default_half_window(1024), 16);
    EXPECT_EQ(default_half_window(4), 1);
    // first window covers n = 1..17, centre n = 9
    EXPECT_DOUBLE_EQ(sdf.frequencies.front(), 9.0 / 256.0);
}

TEST(SmoothedSpectralMatrix, WhiteNoiseIsFlat) {
    const int seeds = 20, m = 16;
    const Index T = 1024, P = 3;
    const int M = window_count(T, m);
    std::vector<CMatrix> mean(static_cast<std::size_t>(M), CMatrix::Zero(P, P));
    for (int s = 0; s < seeds; ++s) {
        const auto sdf = smoothed_spectral_matrix(white_noise(T, P, 100 + s), m);
        for (int l = 0; l < M; ++l) mean[static_cast<std::size_t>(l)] += sdf.matrices[static_cast<std::size_t>(l)] / seeds;
    }
    const double tol = 4.0 / std::sqrt((2.0 * m + 1) * seeds);
    for (const auto& f : mean) EXPECT_LT((f - CMatrix::Identity(P, P)).cwiseAbs().maxCoeff(), tol);
}

TEST(SmoothedSpectralMatrix, HermitianPsd) {
    const auto sdf = smoothed_spectral_matrix(simulate_gnar(gnar_1_1(ring_graph(5), 0.8), 512, 4), 5);
    for (const auto& f : sdf.matrices) {
        EXPECT_LT((f - f.adjoint()).cwiseAbs().maxCoeff(), 1e-10);
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(f);
        EXPECT_GT(eig.eigenvalues().minCoeff(), -1e-10);
    }
}

TEST(SmoothedSpectralMatrix, ZeroSeries) {
    const auto sdf = smoothed_spectral_matrix(TimeSeries::Zero(64, 3), 2);
    for (const auto& f : sdf.matrices) EXPECT_EQ(f.cwiseAbs().maxCoeff(), 0.0);
}

TEST(SmoothedSpectralMatrix, IgnoresZeroFrequency) {
    TimeSeries x = white_noise(128, 2, 9);
    const auto a = smoothed_spectral_matrix(x, 3);
    x.array() += 50.0;
    const auto b = smoothed_spectral_matrix(x, 3);
    for (int l = 0; l < a.count(); ++l)
        EXPECT_LT((a.matrices[static_cast<std::size_t>(l)] - b.matrices[static_cast<std::size_t>(l)]).cwiseAbs().maxCoeff(),
                  1e-9);
}

TEST(SmoothedSpectralMatrix, Errors) {
    EXPECT_THROW(smoothed_spectral_matrix(white_noise(255, 2, 1), 4), DataError);
    EXPECT_THROW(smoothed_spectral_matrix(white_noise(256, 2, 1), 0), ConfigError);
    try {
        smoothed_spectral_matrix(white_noise(8, 2, 1), 3);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("smaller m_t"), std::string::npos);
    }
}

TEST(RealEmbedding, RoundTrip) {
    std::mt19937_64 rng(3);
    const CMatrix h = random_hpd(4, rng);
    const Matrix r = real_embedding(h);
    EXPECT_LT((r - r.transpose()).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT((complex_from_embedding(r) - h).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT((real_embedding(h.inverse()) - r.inverse()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(RealEmbedding, UnpenalizedSolveMatchesInverse) {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 5; ++rep) {
        const CMatrix h = random_hpd(3 + rep, rng);
        const auto sol = solve_glasso<double>(real_embedding(h), 0.0, 10000, 1e-10);
        EXPECT_LT((complex_from_embedding(sol.theta) - h.inverse()).cwiseAbs().maxCoeff(), 1e-6);
        const auto direct = solve_glasso<Complex>(h, 0.0, 10000, 1e-10);
        EXPECT_LT((direct.theta - h.inverse()).cwiseAbs().maxCoeff(), 1e-6);
    }
}

TEST(ComplexGlasso, IdentityDensity) {
    SmoothedSpectralDensity sdf;
    sdf.half_window = 2;
    sdf.window = 5;
    for (int l = 0; l < 4; ++l) {
        sdf.matrices.push_back(CMatrix::Identity(3, 3));
        sdf.frequencies.push_back(0.1 * (l + 1));
    }
    const auto sel = complex_glasso_per_frequency(sdf, FourierConfig{});
    EXPECT_TRUE(sel.degenerate);
    for (const auto& q : sel.best.precisions) EXPECT_LT((q - CMatrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(sel.best.aggregate.cwiseAbs().maxCoeff(), 1.0);
    EXPECT_EQ(threshold_aggregate(sel.best.aggregate).edge_count(), 0);
}

TEST(ComplexGlasso, LargePenaltyGivesDiagonal) {
    const auto sdf = smoothed_spectral_matrix(simulate_gnar(gnar_1_1(ring_graph(5), 0.8), 512, 4), 5);
    double mx = 0.0;
    for (const auto& f : sdf.matrices)
        for (Index p = 0; p < 5; ++p)
            for (Index q = 0; q < 5; ++q)
                if (p != q) mx = std::max(mx, std::abs(f(p, q)));
    const auto set = solve_frequencies(sdf, mx, FourierConfig{});
    for (int e : set.edge_counts) EXPECT_EQ(e, 0);
    for (const auto& q : set.precisions) {
        EXPECT_LT((q - q.adjoint()).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_TRUE(q.isDiagonal(1e-12));
    }
}

TEST(ComplexGlasso, SelectedPointIsPathMinimum) {
    const auto sdf = smoothed_spectral_matrix(simulate_gnar(gnar_1_1(ring_graph(6), 0.8), 1024, 5), 16);
    const auto sel = complex_glasso_per_frequency(sdf, FourierConfig{});
    ASSERT_EQ(sel.path.size(), 20u);
    double best = sel.path.front().value;
    for (const auto& p : sel.path) best = std::min(best, p.value);
    EXPECT_DOUBLE_EQ(fourier_criterion(sel.best, sdf, Criterion::BIC, 0.5, 6), best);
    for (int l = 0; l < sdf.count(); ++l) {
        const CMatrix& q = sel.best.precisions[static_cast<std::size_t>(l)];
        EXPECT_LT((q - q.adjoint()).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(ComplexGlasso, BicUsesTwoLM) {
    FrequencyPrecisionSet set;
    set.precisions.assign(3, CMatrix::Identity(2, 2));
    set.edge_counts = {1, 0, 2};
    set.log_likelihood = -10.0;
    SmoothedSpectralDensity sdf;
    sdf.window = 5;
    sdf.matrices.assign(3, CMatrix::Identity(2, 2));
    EXPECT_NEAR(fourier_criterion(set, sdf, Criterion::BIC, 0.5, 2), 20.0 + std::log(30.0) * 3, 1e-12);
    EXPECT_NEAR(fourier_criterion(set, sdf, Criterion::EBIC, 0.5, 2),
                20.0 + std::log(30.0) * 3 + 2.0 * std::log(2.0) * 3, 1e-12);
}

TEST(ThresholdAggregate, SingleEntryAboveCutoff) {
    Matrix q = Matrix::Constant(4, 4, 5e-7);
    q.diagonal().setOnes();
    q(1, 3) = q(3, 1) = 2e-5;
    const Graph g = threshold_aggregate(q);
    EXPECT_EQ(g.edges(), (std::vector<Edge>{{1, 3}}));
}

TEST(FourierTsGlasso, ChainVarRecovered) {
    Matrix a{{0.5, 0.3, 0.0}, {0.0, 0.5, 0.3}, {0.0, 0.0, 0.5}};
    const VarmaModel m{{a}, {}, Matrix::Identity(3, 3)};
    const Graph truth = spectral_oracle_var(m).graph;
    ASSERT_EQ(truth.edges(), (std::vector<Edge>{{0, 1}, {1, 2}}));
    double tpr = 0.0;
    for (int s = 0; s < 10; ++s) tpr += edge_rates(fourier_ts_glasso(simulate_varma(m, 1024, 40 + s), {}).graph, truth).tpr / 10;
    EXPECT_GE(tpr, 0.8);
}

TEST(FourierTsGlasso, WhiteNoiseGivesEmptyGraph) {
    int empty = 0;
    for (int s = 0; s < 5; ++s) empty += fourier_ts_glasso(white_noise(1024, 6, 500 + s), {}).graph.edge_count() == 0;
    EXPECT_GE(empty, 4);
}

TEST(FourierTsGlasso, Errors) {
    FourierConfig c;
    c.lambda_ratio = 0.0;
    EXPECT_THROW(fourier_ts_glasso(white_noise(64, 2, 1), c), ConfigError);
    EXPECT_THROW(fourier_ts_glasso(TimeSeries(64, 0), {}), DataError);
    TimeSeries bad = white_noise(64, 2, 1);
    bad(3, 1) = std::nan("");
    EXPECT_THROW(fourier_ts_glasso(bad, {}), DataError);
}
