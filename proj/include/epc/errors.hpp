#pragma once

#include <stdexcept>
#include <string>

namespace epc {

/// Invalid or inconsistent configuration input. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent measured data (timestamp files, count tables). CLI exit code 3.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative solver did not reach its convergence criterion. CLI exit code 4.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace epc
