#include <gtest/gtest.h>

#include <random>

#include <wavecig/cig.hpp>
#include <wavecig/metrics.hpp>
#include <wavecig/network.hpp>
#include <wavecig/simulate.hpp>

using namespace wavecig;

namespace {

EdgeValueSet make_set(int nodes, const std::vector<std::pair<Edge, double>>& values) {
    EdgeValueSet s;
    s.nodes = nodes;
    for (const auto& [e, v] : values) s.values.push_back({e, v});
    return s;
}

PrecisionEstimate estimate_with(const Matrix& theta, int scale) {
    PrecisionEstimate e;
    e.theta = theta;
    e.scale = scale;
    e.edge_count = count_edges(theta);
    return e;
}

}  // namespace

TEST(TwoMeans, SeparatesObviousClusters) {
    const auto km = two_means({0.9, 0.8, 0.01, 0.02});
    EXPECT_EQ(km.upper, (std::vector<bool>{true, true, false, false}));
    EXPECT_NEAR(km.high, 0.85, 1e-15);
    EXPECT_NEAR(km.low, 0.015, 1e-15);
}

TEST(TwoMeans, MidpointTieGoesLow) {
    const auto km = two_means({0.0, 1.0, 2.0});
    // centres start at 0 and 2; the value 1 is equidistant
    EXPECT_EQ(km.upper, (std::vector<bool>{false, false, true}));
}

TEST(TwoMeans, NoiseCentreStartsAtZero) {
    const auto km = two_means({0.42, 0.5, 0.46, 0.52});
    EXPECT_EQ(km.upper, (std::vector<bool>(4, true)));
    EXPECT_EQ(km.low, 0.0);
    EXPECT_NEAR(km.high, 0.475, 1e-15);
}

TEST(ClusterEdges, KeepsLargePair) {
    const auto g = cluster_edges(make_set(4, {{{0, 1}, 0.9}, {{2, 3}, 0.8}, {{0, 2}, 0.01}, {{1, 3}, 0.02}}));
    EXPECT_EQ(g.edges(), (std::vector<Edge>{{0, 1}, {2, 3}}));
}

TEST(ClusterEdges, DegenerateCases) {
    EXPECT_EQ(cluster_edges(make_set(3, {})).edge_count(), 0);
    EXPECT_EQ(cluster_edges(make_set(3, {{{0, 2}, 0.4}})).edges(), (std::vector<Edge>{{0, 2}}));
    EXPECT_EQ(cluster_edges(make_set(3, {{{0, 1}, 0.4}, {{1, 2}, 0.4}, {{0, 2}, 0.4}})).edge_count(), 3);
    EXPECT_EQ(cluster_edges(make_set(3, {{{0, 1}, 0.1}, {{1, 2}, 0.8}})).edges(), (std::vector<Edge>{{1, 2}}));
}

TEST(ClusterEdges, ScaleInvariantSubsetAndDeterministic) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(1e-4, 1.0);
    for (int rep = 0; rep < 30; ++rep) {
        std::vector<std::pair<Edge, double>> vals;
        for (int p = 0; p < 7; ++p)
            for (int q = p + 1; q < 7; ++q)
                if (u(rng) < 0.5) vals.push_back({{p, q}, u(rng)});
        const auto set = make_set(7, vals);
        auto scaled = set;
        for (auto& v : scaled.values) v.value *= 37.5;
        const Graph g = cluster_edges(set);
        EXPECT_TRUE(g == cluster_edges(scaled));
        EXPECT_TRUE(g == cluster_edges(set));
        for (auto [p, q] : g.edges()) {
            bool present = false;
            for (const auto& v : set.values) present = present || v.edge == Edge{p, q};
            EXPECT_TRUE(present);
        }
    }
}

TEST(EdgeValues, ThresholdedUpperTriangle) {
    Matrix t = Matrix::Identity(3, 3);
    t(0, 1) = t(1, 0) = -0.3;
    t(1, 2) = t(2, 1) = 5e-6;
    const auto set = edge_values(estimate_with(t, 2));
    ASSERT_EQ(set.values.size(), 1u);
    EXPECT_EQ(set.values[0].edge, (Edge{0, 1}));
    EXPECT_DOUBLE_EQ(set.values[0].value, 0.3);
    EXPECT_EQ(set.scale, 2);
}

TEST(ScaleHint, Resolution) {
    EXPECT_EQ(ScaleHint::finest().resolve(9), 1);
    EXPECT_EQ(ScaleHint::middle().resolve(9), 4);
    EXPECT_EQ(ScaleHint::middle().resolve(1), 1);
    EXPECT_EQ(ScaleHint::parse("3").resolve(9), 3);
    EXPECT_EQ(ScaleHint::parse("middle").kind, ScaleHintKind::Middle);
    EXPECT_THROW(ScaleHint::at(10).resolve(9), ConfigError);
    EXPECT_THROW(ScaleHint::parse("0"), ConfigError);
    EXPECT_THROW(ScaleHint::parse("coarse"), ConfigError);
    EXPECT_THROW(ScaleHint::parse("2x"), ConfigError);
}

TEST(DiscoverNetwork, UsesHintedScale) {
    std::vector<PrecisionEstimate> est;
    for (int j = 1; j <= 9; ++j) {
        Matrix t = Matrix::Identity(4, 4);
        if (j == 4) t(0, 3) = t(3, 0) = 0.5;
        est.push_back(estimate_with(t, j));
    }
    EXPECT_EQ(discover_network(est).edge_count(), 0);
    EXPECT_EQ(discover_network(est, ScaleHint::middle()).edges(), (std::vector<Edge>{{0, 3}}));
    EXPECT_THROW(discover_network(est, ScaleHint::at(12)), ConfigError);
    EXPECT_THROW(discover_network({}), DataError);
}

TEST(DiscoverNetwork, AllEmptyEstimates) {
    std::vector<PrecisionEstimate> est(5, estimate_with(Matrix::Identity(3, 3), 1));
    EXPECT_EQ(discover_network(est, ScaleHint::middle()).edge_count(), 0);
}

TEST(DiscoverNetwork, RingNetworkAtFinestScale) {
    const Graph ring = ring_graph(10);
    const GnarModel m = gnar_1_1(ring, 0.65);
    double tpr = 0.0, fpr = 0.0;
    const int seeds = 3;
    for (int s = 0; s < seeds; ++s) {
        WavTsGlassoConfig c;
        c.bootstraps = 10;
        c.seeds = RngSeedPlan{static_cast<std::uint64_t>(s)};
        const auto est = estimate_scale_precisions(simulate_gnar(m, 1024, 300 + s), c);
        const Graph g = discover_network(est.estimates);
        const Graph support = support_graph(est.estimates[0].theta);
        for (auto [p, q] : g.edges()) EXPECT_TRUE(support.has_edge(p, q));
        const auto r = edge_rates(g, ring);
        tpr += r.tpr / seeds;
        fpr += r.fpr / seeds;
    }
    EXPECT_GE(tpr, 0.8);
    EXPECT_LE(fpr, 0.05);
}
