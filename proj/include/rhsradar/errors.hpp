#ifndef RHSRADAR_ERRORS_HPP
#define RHSRADAR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rhsradar {

/// Invalid experiment configuration (bad file, unknown key, out-of-range value).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Degenerate numerical input (singular noise covariance, non-PSD matrix, ...).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace rhsradar

#endif
