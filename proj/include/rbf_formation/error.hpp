#pragma once

#include <stdexcept>
#include <string>

namespace rbf_formation {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite or out-of-domain argument to a pure function.
class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// Bad configuration detected before any simulation stepping.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// The converter was asked for a thrust direction it cannot produce (u_z <= -g).
class InfeasibleCommandError : public Error {
public:
    using Error::Error;
};

/// The plant state left its valid region or became non-finite.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, double time)
        : Error(what + " at t=" + std::to_string(time)), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

/// The RBF weight update produced a non-finite matrix.
class EstimatorDivergenceError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace rbf_formation
