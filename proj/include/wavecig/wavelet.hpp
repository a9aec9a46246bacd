#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "types.hpp"

namespace wavecig {

enum class WaveletFamily { Haar, Daubechies };

/// Compactly supported orthonormal wavelet: Haar, or Daubechies extremal
/// phase with `order` vanishing moments (2 * order taps; order 1 is Haar).
struct WaveletSpec {
    WaveletFamily family = WaveletFamily::Haar;
    int order = 1;

    static WaveletSpec haar() { return {}; }
    static WaveletSpec daubechies(int n) {
        return n == 1 ? haar() : WaveletSpec{WaveletFamily::Daubechies, n};
    }

    /// Accepts "haar" and "db1".."db10".
    static WaveletSpec parse(const std::string& name) {
        std::string s = name;
        std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
        if (s == "haar") return haar();
        if (s.size() > 2 && s.rfind("db", 0) == 0) {
            const std::string digits = s.substr(2);
            if (std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); })) {
                const int n = std::stoi(digits);
                if (n >= 1 && n <= 10) return daubechies(n);
            }
        }
        throw ConfigError("unsupported wavelet '" + name + "' (expected haar or db1..db10)");
    }

    std::string name() const {
        return family == WaveletFamily::Haar ? "haar" : "db" + std::to_string(order);
    }

    friend bool operator==(const WaveletSpec&, const WaveletSpec&) = default;
};

namespace detail {

// Low-pass reconstruction filters, extremal phase, unit l2 norm.
inline const std::vector<double>& daubechies_lowpass(int order) {
    static const std::vector<std::vector<double>> table = {
        {0.70710678118654757, 0.70710678118654757},
        {0.48296291314453416, 0.83651630373780794, 0.22414386804201339, -0.12940952255126037},
        {0.33267055295008263, 0.80689150931109255, 0.45987750211849154, -0.13501102001025458,
         -0.085441273882026658, 0.035226291885709533},
        {0.23037781330889651, 0.71484657055291567, 0.63088076792985892, -0.027983769416859854,
         -0.18703481171909309, 0.030841381835560764, 0.032883011666885197, -0.010597401785069032},
        {0.16010239797419293, 0.60382926979718965, 0.72430852843777294, 0.13842814590132074,
         -0.24229488706638203, -0.032244869584638375, 0.077571493840045719, -0.0062414902127982744,
         -0.012580751999081999, 0.0033357252854737712},
        {0.11154074335010947, 0.49462389039845306, 0.75113390802109536, 0.31525035170919763,
         -0.22626469396543983, -0.12976686756726194, 0.097501605587323043, 0.027522865530305727,
         -0.03158203931748603, 0.00055384220116149613, 0.0047772575109455108, -0.0010773010853084796},
        {0.077852054085009184, 0.39653931948191729, 0.72913209084623509, 0.46978228740519312,
         -0.14390600392856498, -0.22403618499387498, 0.071309219266830259, 0.080612609151083078,
         -0.038029936935014413, -0.016574541630666881, 0.01255099855609984, 0.00042957797292136651,
         -0.0018016407040474908, 0.00035371379997452024},
        {0.054415842243104008, 0.31287159091429995, 0.67563073629728976, 0.58535468365420673,
         -0.015829105256349306, -0.28401554296154691, 0.00047248457391328279, 0.12874742662047847,
         -0.017369301001807547, -0.044088253930794755, 0.013981027917398282, 0.0087460940474057766,
         -0.0048703529934515741, -0.00039174037337694705, 0.00067544940645056933,
         -0.00011747678412476953},
        {0.038077947363878345, 0.24383467461259034, 0.60482312369011115, 0.65728807805130052,
         0.13319738582500756, -0.29327378327917492, -0.096840783222976456, 0.14854074933810638,
         0.03072568147933338, -0.067632829061329974, 0.00025094711483145197, 0.022361662123679096,
         -0.0047232047577513972, -0.0042815036824634303, 0.0018476468830562265,
         0.00023038576352319597, -0.00025196318894271012, 3.9347320316271603e-05},
        {0.026670057900555554, 0.1881768000776915, 0.52720118893172563, 0.68845903945360354,
         0.28117234366057747, -0.24984642432731538, -0.19594627437737705, 0.12736934033579325,
         0.093057364603572348, -0.071394147166397082, -0.029457536821875813, 0.033212674059341002,
         0.0036065535669561697, -0.010733175483330575, 0.0013953517470529011,
         0.0019924052951850561, -0.00068585669495971162, -0.00011646685512928545,
         9.3588670320069592e-05, -1.3264202894521244e-05},
    };
    return table.at(static_cast<std::size_t>(order - 1));
}

/// Full linear convolution of `a` with `taps` dilated by `dilation`
/// (i.e. with dilation-1 zeros inserted between consecutive taps).
inline std::vector<double> convolve_dilated(const std::vector<double>& a, const std::vector<double>& taps,
                                            std::size_t dilation) {
    std::vector<double> out(a.size() + (taps.size() - 1) * dilation, 0.0);
    for (std::size_t m = 0; m < taps.size(); ++m) {
        const double t = taps[m];
        if (t == 0.0) continue;
        const std::size_t off = m * dilation;
        for (std::size_t i = 0; i < a.size(); ++i) out[i + off] += a[i] * t;
    }
    return out;
}

/// Autocorrelation sum_k f[k] f[k - tau] for tau = -(n-1)..(n-1), stored from tau = -(n-1).
inline std::vector<double> autocorrelation(const std::vector<double>& f) {
    const std::size_t n = f.size();
    std::vector<double> out(2 * n - 1, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) out[i + n - 1 - k] += f[i] * f[k];
    return out;
}

}  // namespace detail

/// Low-pass (scaling) filter h.
inline std::vector<double> scaling_filter(const WaveletSpec& spec) {
    if (spec.family == WaveletFamily::Haar) return detail::daubechies_lowpass(1);
    if (spec.order < 1 || spec.order > 10)
        throw ConfigError("Daubechies order must be in 1..10, got " + std::to_string(spec.order));
    return detail::daubechies_lowpass(spec.order);
}

/// Quadrature-mirror high-pass filter g[k] = (-1)^k h[L-1-k].
inline std::vector<double> wavelet_filter(const WaveletSpec& spec) {
    const auto h = scaling_filter(spec);
    const std::size_t n = h.size();
    std::vector<double> g(n);
    for (std::size_t k = 0; k < n; ++k) g[k] = (k % 2 == 0 ? 1.0 : -1.0) * h[n - 1 - k];
    return g;
}

/// Non-decimated wavelet filters psi_j for j = 1 (finest) .. levels (coarsest).
struct WaveletFilters {
    WaveletSpec spec;
    int levels = 0;
    std::vector<std::vector<double>> taps;  // taps[j - 1]

    const std::vector<double>& level(int j) const { return taps.at(static_cast<std::size_t>(j - 1)); }
    std::size_t base_length() const { return scaling_filter(spec).size(); }
};

inline WaveletFilters build_filters(const WaveletSpec& spec, int levels) {
    if (levels < 1) throw ConfigError("wavelet levels must be >= 1");
    if (levels > 24) throw ConfigError("wavelet levels must be <= 24");
    const auto h = scaling_filter(spec);
    const auto g = wavelet_filter(spec);
    WaveletFilters out{spec, levels, {}};
    out.taps.reserve(static_cast<std::size_t>(levels));
    std::vector<double> lowpass_cascade{1.0};
    for (int j = 1; j <= levels; ++j) {
        const std::size_t dilation = std::size_t{1} << (j - 1);
        out.taps.push_back(detail::convolve_dilated(lowpass_cascade, g, dilation));
        lowpass_cascade = detail::convolve_dilated(lowpass_cascade, h, dilation);
    }
    return out;
}

/// DFTs of the level filters wrapped onto a circle of `length` points.
class CircularFilterBank {
public:
    CircularFilterBank(const WaveletFilters& filters, Index length) : length_(length) {
        if (length < 1) throw ConfigError("filter bank length must be positive");
        Eigen::FFT<double> fft;
        responses_.reserve(filters.taps.size());
        for (const auto& taps : filters.taps) {
            std::vector<double> wrapped(static_cast<std::size_t>(length), 0.0);
            for (std::size_t i = 0; i < taps.size(); ++i) wrapped[i % static_cast<std::size_t>(length)] += taps[i];
            std::vector<Complex> spectrum;
            fft.fwd(spectrum, wrapped);
            responses_.push_back(std::move(spectrum));
        }
    }

    Index length() const { return length_; }
    int levels() const { return static_cast<int>(responses_.size()); }
    const std::vector<Complex>& response(int j) const { return responses_.at(static_cast<std::size_t>(j - 1)); }

private:
    Index length_;
    std::vector<std::vector<Complex>> responses_;
};

/// Coefficients d_{j,k}^{(p)}; scale(j) is a T x P matrix.
struct WaveletCoefficients {
    std::vector<Matrix> scales;  // scales[j - 1]

    int levels() const { return static_cast<int>(scales.size()); }
    Index length() const { return scales.empty() ? 0 : scales.front().rows(); }
    Index channels() const { return scales.empty() ? 0 : scales.front().cols(); }
    const Matrix& scale(int j) const { return scales.at(static_cast<std::size_t>(j - 1)); }
    double operator()(int j, Index k, Index p) const { return scale(j)(k, p); }
};

/// d_{j,k} = sum_t x_t psi_j(t - k) with periodic boundary, using a prebuilt bank.
inline WaveletCoefficients ndwt_coefficients(const TimeSeries& x, const CircularFilterBank& bank) {
    const Index T = x.rows();
    const Index P = x.cols();
    if (T != bank.length()) throw DataError("ndwt: series length does not match filter bank length");
    WaveletCoefficients out;
    out.scales.assign(static_cast<std::size_t>(bank.levels()), Matrix(T, P));
    Eigen::FFT<double> fft;
    std::vector<double> column(static_cast<std::size_t>(T));
    std::vector<double> result;
    std::vector<Complex> spectrum;
    std::vector<Complex> product(static_cast<std::size_t>(T));
    for (Index p = 0; p < P; ++p) {
        for (Index t = 0; t < T; ++t) column[static_cast<std::size_t>(t)] = x(t, p);
        fft.fwd(spectrum, column);
        for (int j = 1; j <= bank.levels(); ++j) {
            const auto& w = bank.response(j);
            for (std::size_t f = 0; f < product.size(); ++f) product[f] = spectrum[f] * std::conj(w[f]);
            fft.inv(result, product);
            auto& d = out.scales[static_cast<std::size_t>(j - 1)];
            for (Index k = 0; k < T; ++k) d(k, p) = result[static_cast<std::size_t>(k)];
        }
    }
    return out;
}

/// Requires T = 2^J with J = filters.levels; non-dyadic input must be padded first.
inline WaveletCoefficients ndwt_coefficients(const TimeSeries& x, const WaveletFilters& filters) {
    const Index T = x.rows();
    if (!is_power_of_two(T) || T < 2)
        throw DataError("ndwt: series length " + std::to_string(T) + " is not dyadic; pad first");
    if (log2_exact(T) != filters.levels)
        throw DataError("ndwt: filters have " + std::to_string(filters.levels) + " levels but log2(T) = " +
                        std::to_string(log2_exact(T)));
    return ndwt_coefficients(x, CircularFilterBank(filters, T));
}

/// Discrete autocorrelation wavelets and their inner-product matrix C.
struct AutocorrInnerProduct {
    std::vector<std::vector<double>> acw;  // acw[j-1][tau + max_lag(j)]
    Matrix C;
    Matrix C_inv;

    int levels() const { return static_cast<int>(acw.size()); }
    Index max_lag(int j) const { return static_cast<Index>(acw.at(static_cast<std::size_t>(j - 1)).size() / 2); }

    /// Psi_j(tau); zero outside the support.
    double psi(int j, Index tau) const {
        const auto& a = acw.at(static_cast<std::size_t>(j - 1));
        const Index m = static_cast<Index>(a.size() / 2);
        if (tau < -m || tau > m) return 0.0;
        return a[static_cast<std::size_t>(tau + m)];
    }
};

/// Psi_j via the cascade of dilated filter autocorrelations, then
/// C_{jl} = sum_tau Psi_j(tau) Psi_l(tau) and its dense inverse.
inline AutocorrInnerProduct autocorrelation_inner_product(const WaveletFilters& filters) {
    const auto ah = detail::autocorrelation(scaling_filter(filters.spec));
    const auto ag = detail::autocorrelation(wavelet_filter(filters.spec));
    const int J = filters.levels;
    AutocorrInnerProduct out;
    out.acw.reserve(static_cast<std::size_t>(J));
    std::vector<double> lowpass_cascade{1.0};
    for (int j = 1; j <= J; ++j) {
        const std::size_t dilation = std::size_t{1} << (j - 1);
        out.acw.push_back(detail::convolve_dilated(lowpass_cascade, ag, dilation));
        lowpass_cascade = detail::convolve_dilated(lowpass_cascade, ah, dilation);
    }
    out.C = Matrix::Zero(J, J);
    for (int j = 1; j <= J; ++j) {
        for (int l = j; l <= J; ++l) {
            const Index m = std::min(out.max_lag(j), out.max_lag(l));
            double s = 0.0;
            for (Index tau = -m; tau <= m; ++tau) s += out.psi(j, tau) * out.psi(l, tau);
            out.C(j - 1, l - 1) = s;
            out.C(l - 1, j - 1) = s;
        }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(out.C, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 1e-13 * hi))
        throw NumericalError("autocorrelation inner-product matrix is numerically singular for wavelet " +
                             filters.spec.name() + " with J = " + std::to_string(J));
    out.C_inv = out.C.fullPivLu().inverse();
    return out;
}

}  // namespace wavecig
