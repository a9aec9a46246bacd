#pragma once

#include <random>

#include <wavecig/simulate.hpp>

namespace wavecig::test_support {

/// Random stationary GNAR design: ER network, lag order 1 or 2, stages 1 or 2,
/// positive coefficients scaled so the row sums of |A_l| stay below 0.9.
inline GnarModel random_gnar_design(std::uint64_t seed, int max_nodes = 8) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> nodes(3, max_nodes);
    std::uniform_int_distribution<int> small(1, 2);
    std::uniform_real_distribution<double> rho(0.2, 0.5);
    std::uniform_real_distribution<double> coef(0.2, 1.0);
    GnarModel m;
    const int P = nodes(rng);
    m.graph = erdos_renyi(P, rho(rng), rng());
    const int order = small(rng);
    for (int l = 0; l < order; ++l) m.stages.push_back(small(rng));
    m.alpha = Matrix(order, P);
    m.beta.resize(static_cast<std::size_t>(order));
    for (int l = 0; l < order; ++l) {
        for (int i = 0; i < P; ++i) m.alpha(l, i) = coef(rng);
        for (int r = 0; r < m.stages[static_cast<std::size_t>(l)]; ++r) {
            m.beta[static_cast<std::size_t>(l)].push_back(coef(rng));
        }
    }
    // row sums of sum_l |A_l| are at most this bound
    double bound = 0.0;
    for (int l = 0; l < order; ++l) {
        bound += m.alpha.row(l).maxCoeff();
        for (double b : m.beta[static_cast<std::size_t>(l)]) bound += b;
    }
    const double scale = 0.9 / bound;
    m.alpha *= scale;
    for (auto& lag : m.beta)
        for (auto& b : lag) b *= scale;
    return m;
}

}  // namespace wavecig::test_support
