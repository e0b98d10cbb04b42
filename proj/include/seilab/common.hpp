#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace seilab {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

/// Bad or missing configuration. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A required artifact (dataset, checkpoint) is absent. Exit code 3.
class PrerequisiteError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite values escaped a numeric routine. Exit code 4.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File-level I/O failure; the message carries the path and the cause.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace seilab
