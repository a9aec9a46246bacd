#pragma once

#include <string>
#include <vector>

#include "types.hpp"
#include "wavelet.hpp"

namespace wavecig {

enum class SpectrumKind { SHatX, SHatY, Beta, AveragedPeriodogram };

/// One symmetric P x P matrix per scale, j = 1 (finest) .. J.
struct WaveletSpectrum {
    SpectrumKind kind = SpectrumKind::AveragedPeriodogram;
    std::vector<Matrix> scales;  // scales[j - 1]

    int levels() const { return static_cast<int>(scales.size()); }
    Index channels() const { return scales.empty() ? 0 : scales.front().rows(); }
    const Matrix& at(int j) const { return scales.at(static_cast<std::size_t>(j - 1)); }
    Matrix& at(int j) { return scales.at(static_cast<std::size_t>(j - 1)); }
};

struct PaddedSeries {
    TimeSeries data;
    Index original_length = 0;
};

/// Extends x to the next power of two by appending its time-reversed tail
/// (x_{T-1}, x_{T-2}, ...). Dyadic input is returned unchanged.
inline PaddedSeries symmetric_pad(const TimeSeries& x) {
    const Index T = x.rows();
    if (T < 2) throw DataError("symmetric_pad: need at least two observations");
    const Index target = next_power_of_two(T);
    PaddedSeries out{TimeSeries(target, x.cols()), T};
    out.data.topRows(T) = x;
    for (Index i = 0; i < target - T; ++i) out.data.row(T + i) = x.row(T - 1 - i);
    return out;
}

/// Raw wavelet periodogram I_{j,k} = d_{j,k} d_{j,k}^T, evaluated on demand
/// from the coefficients it wraps.
struct RawPeriodogram {
    WaveletCoefficients coefficients;

    int levels() const { return coefficients.levels(); }
    Index length() const { return coefficients.length(); }
    Matrix at(int j, Index k) const {
        const auto d = coefficients.scale(j).row(k).transpose();
        return d * d.transpose();
    }
};

/// Ibar_j = (1/T) sum_k I_{j,k}.
inline WaveletSpectrum time_averaged_periodogram(const WaveletCoefficients& coeffs) {
    WaveletSpectrum out{SpectrumKind::AveragedPeriodogram, {}};
    out.scales.reserve(static_cast<std::size_t>(coeffs.levels()));
    const double inv_t = coeffs.length() > 0 ? 1.0 / static_cast<double>(coeffs.length()) : 0.0;
    for (const auto& d : coeffs.scales) {
        Matrix m = Matrix::Zero(d.cols(), d.cols());
        m.selfadjointView<Eigen::Lower>().rankUpdate(d.transpose(), inv_t);
        out.scales.push_back(m.selfadjointView<Eigen::Lower>());
    }
    return out;
}

inline WaveletSpectrum time_averaged_periodogram(const RawPeriodogram& raw) {
    return time_averaged_periodogram(raw.coefficients);
}

/// Entrywise scale mixing: out_j = sum_l M(j, l) in_l.
inline WaveletSpectrum mix_scales(const WaveletSpectrum& in, const Matrix& mixing, SpectrumKind kind) {
    const int J = in.levels();
    if (mixing.rows() != J || mixing.cols() != J)
        throw DataError("scale mixing matrix is " + std::to_string(mixing.rows()) + "x" +
                        std::to_string(mixing.cols()) + " but spectrum has " + std::to_string(J) + " scales");
    WaveletSpectrum out{kind, {}};
    out.scales.assign(static_cast<std::size_t>(J), Matrix::Zero(in.channels(), in.channels()));
    for (int j = 0; j < J; ++j)
        for (int l = 0; l < J; ++l) out.scales[j].noalias() += mixing(j, l) * in.scales[l];
    return out;
}

/// Clips eigenvalues below eps_rel * max(lambda_max, 1e-12). A matrix that
/// already clears the floor is returned as is.
inline Matrix regularize_pd(const Matrix& m, double eps_rel = 1e-6) {
    if (m.rows() != m.cols()) throw DataError("regularize_pd: matrix must be square");
    if (m.size() == 0) return m;
    const Matrix sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
    if (eig.info() != Eigen::Success) throw NumericalError("regularize_pd: eigendecomposition failed");
    const Vector& values = eig.eigenvalues();
    const double floor = eps_rel * std::max(values.maxCoeff(), 1e-12);
    // Slack so that a matrix produced by this function passes through untouched.
    if (values.minCoeff() >= floor * (1.0 - 1e-9)) return m;
    const Vector clipped = values.cwiseMax(floor);
    Matrix out = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
    return 0.5 * (out + out.transpose());
}

/// S_hat_j = sum_l (C^-1)_{jl} Ibar_l, each scale then regularized to PD.
inline WaveletSpectrum bias_correct(const WaveletSpectrum& averaged, const Matrix& c_inv, double eps_rel = 1e-6) {
    WaveletSpectrum out = mix_scales(averaged, c_inv, SpectrumKind::SHatX);
    for (auto& s : out.scales) s = regularize_pd(s, eps_rel);
    return out;
}

}  // namespace wavecig
