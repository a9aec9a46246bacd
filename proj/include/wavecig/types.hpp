#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace wavecig {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;
using Index = Eigen::Index;

/// Multivariate sample stored as T rows (time points) by P columns (channels).
using TimeSeries = Eigen::MatrixXd;

/// Entries with magnitude below this value are treated as structural zeros.
inline constexpr double kSupportThreshold = 1e-5;

/// Base of all library errors. `exit_code()` follows the CLI convention.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept { return 2; }
};

/// Invalid parameters or unsupported options.
class ConfigError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 1; }
};

/// Malformed or inconsistent input data.
class DataError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

/// Solver failures, singular systems and the like.
class NumericalError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

/// Rethrows the active exception with `prefix` prepended, keeping its category.
[[noreturn]] inline void rethrow_with_context(const std::string& prefix) {
    try {
        throw;
    } catch (const ConfigError& e) {
        throw ConfigError(prefix + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError(prefix + e.what());
    } catch (const DataError& e) {
        throw DataError(prefix + e.what());
    } catch (const std::exception& e) {
        throw NumericalError(prefix + e.what());
    }
}

inline bool is_power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

inline int log2_exact(Index n) {
    int j = 0;
    while ((Index{1} << j) < n) ++j;
    return j;
}

inline Index next_power_of_two(Index n) {
    Index m = 1;
    while (m < n) m <<= 1;
    return m;
}

}  // namespace wavecig
