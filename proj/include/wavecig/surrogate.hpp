#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "parallel.hpp"
#include "spectral.hpp"
#include "types.hpp"
#include "wavelet.hpp"

namespace wavecig {

/// splitmix64 finalizer; a bijection on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Per-replicate seeds derived from one base seed. Distinct replicates get
/// distinct seeds because mix64 is invertible.
struct RngSeedPlan {
    std::uint64_t base_seed = 0;

    std::uint64_t seed(std::uint64_t replicate) const {
        return mix64(base_seed + 0x9e3779b97f4a7c15ULL * replicate);
    }
    RngSeedPlan child(std::uint64_t stream) const { return {seed(stream) ^ 0x5851f42d4c957f2dULL}; }
};

/// Target spectrum for the surrogate process together with lower-triangular
/// transfer roots V_j (V_j V_j^T = S_j) and the wavelet used to synthesize it.
struct SurrogateSpec {
    WaveletSpectrum spectrum;
    std::vector<Matrix> roots;  // roots[j - 1]
    WaveletFilters filters;

    int levels() const { return static_cast<int>(roots.size()); }
    Index channels() const { return roots.empty() ? 0 : roots.front().rows(); }
};

/// Builds a spec directly from per-scale PD spectra (regularized, then Cholesky).
inline SurrogateSpec surrogate_from_spectrum(WaveletSpectrum spectrum, WaveletFilters filters, double eps_rel = 1e-6) {
    if (spectrum.levels() != filters.levels)
        throw DataError("surrogate: spectrum has " + std::to_string(spectrum.levels()) +
                        " scales but filters have " + std::to_string(filters.levels));
    SurrogateSpec out{std::move(spectrum), {}, std::move(filters)};
    out.roots.reserve(out.spectrum.scales.size());
    for (auto& s : out.spectrum.scales) {
        s = regularize_pd(s, eps_rel);
        Eigen::LLT<Matrix> llt(s);
        if (llt.info() != Eigen::Success) throw NumericalError("surrogate: Cholesky factorization failed");
        out.roots.push_back(llt.matrixL());
    }
    return out;
}

/// S_hat^{(Y)}_j = sum_l (C^-1)_{jl} S_hat^{(X)}_l; the surrogate's beta-spectrum
/// then matches S_hat^{(X)}.
inline SurrogateSpec surrogate_spectrum(const WaveletSpectrum& s_hat_x, const Matrix& c_inv,
                                        const WaveletFilters& filters, double eps_rel = 1e-6) {
    return surrogate_from_spectrum(mix_scales(s_hat_x, c_inv, SpectrumKind::SHatY), filters, eps_rel);
}

/// Y_t = sum_j sum_k V_j psi_j(t - k) eps_{j,k}, eps iid N(0, I), circular in k.
/// Innovations are drawn scale by scale, time by time, channel by channel.
inline TimeSeries simulate_mvlsw(const SurrogateSpec& spec, const CircularFilterBank& bank, std::uint64_t seed) {
    const Index T = bank.length();
    const Index P = spec.channels();
    if (bank.levels() != spec.levels())
        throw DataError("simulate_mvlsw: spec has " + std::to_string(spec.levels()) +
                        " scales but log2(T) = " + std::to_string(bank.levels()));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::FFT<double> fft;
    const auto n = static_cast<std::size_t>(T);
    std::vector<std::vector<Complex>> acc(static_cast<std::size_t>(P), std::vector<Complex>(n, Complex{}));
    Matrix eps(T, P);
    std::vector<double> column(n);
    std::vector<Complex> spectrum;
    for (int j = 1; j <= spec.levels(); ++j) {
        for (Index k = 0; k < T; ++k)
            for (Index p = 0; p < P; ++p) eps(k, p) = normal(rng);
        const Matrix z = eps * spec.roots[static_cast<std::size_t>(j - 1)].transpose();
        const auto& w = bank.response(j);
        for (Index p = 0; p < P; ++p) {
            for (Index k = 0; k < T; ++k) column[static_cast<std::size_t>(k)] = z(k, p);
            fft.fwd(spectrum, column);
            auto& a = acc[static_cast<std::size_t>(p)];
            for (std::size_t f = 0; f < n; ++f) a[f] += w[f] * spectrum[f];
        }
    }
    TimeSeries y(T, P);
    std::vector<double> out;
    for (Index p = 0; p < P; ++p) {
        fft.inv(out, acc[static_cast<std::size_t>(p)]);
        for (Index t = 0; t < T; ++t) y(t, p) = out[static_cast<std::size_t>(t)];
    }
    return y;
}

inline TimeSeries simulate_mvlsw(const SurrogateSpec& spec, Index T, std::uint64_t seed) {
    if (!is_power_of_two(T) || log2_exact(T) != spec.levels())
        throw DataError("simulate_mvlsw: T = " + std::to_string(T) + " does not match " +
                        std::to_string(spec.levels()) + " scales");
    return simulate_mvlsw(spec, CircularFilterBank(spec.filters, T), seed);
}

/// Ibarbar_j = (1/R) sum_r Ibar_j(Y^(r)). Replicates are independent and may
/// run concurrently; the reduction is always performed in replicate order.
inline WaveletSpectrum bootstrap_average_periodogram(const SurrogateSpec& spec, Index T, int replicates,
                                                     const RngSeedPlan& plan, unsigned threads = 0) {
    if (replicates < 1) throw ConfigError("bootstrap replicate count must be >= 1");
    if (!is_power_of_two(T) || log2_exact(T) != spec.levels())
        throw DataError("bootstrap: T = " + std::to_string(T) + " does not match " +
                        std::to_string(spec.levels()) + " scales");
    const CircularFilterBank bank(spec.filters, T);
    std::vector<WaveletSpectrum> per_replicate(static_cast<std::size_t>(replicates));
    parallel_for(
        per_replicate.size(),
        [&](std::size_t r) {
            const TimeSeries y = simulate_mvlsw(spec, bank, plan.seed(r + 1));
            per_replicate[r] = time_averaged_periodogram(ndwt_coefficients(y, bank));
        },
        threads);
    WaveletSpectrum out{SpectrumKind::AveragedPeriodogram, per_replicate.front().scales};
    for (std::size_t r = 1; r < per_replicate.size(); ++r)
        for (std::size_t j = 0; j < out.scales.size(); ++j) out.scales[j] += per_replicate[r].scales[j];
    for (auto& m : out.scales) m /= static_cast<double>(replicates);
    return out;
}

}  // namespace wavecig
