#pragma once

#include <stdexcept>
#include <string>

namespace wfp {

/// Bad user input: malformed config files, invalid grids, out-of-range
/// parameters. Maps to exit code 2 in the CLI.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A solver or time integrator failed to converge / blew up.
/// Maps to exit code 3.
class DivergenceError : public std::runtime_error {
public:
    explicit DivergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A mathematical invariant that must hold by construction was violated
/// (mass drift, imaginary residue, Hermiticity, ...). Maps to exit code 4.
class InvariantError : public std::runtime_error {
public:
    explicit InvariantError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Weighted-norm accumulation left the representable range even in log
/// domain.
class OverflowError : public std::runtime_error {
public:
    explicit OverflowError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace wfp
