#pragma once

#include <stdexcept>
#include <string>

namespace cfc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value outside the mathematical domain of an operation (zero voltage, pole hit, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed arguments: wrong sizes, too few samples, bad ranges.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Transfer function that cannot be turned into a state-space block.
class ImproperTransferFunctionError : public Error {
public:
    using Error::Error;
};

/// Network graph is not connected over its nonzero branches.
class DisconnectedNetworkError : public Error {
public:
    using Error::Error;
};

/// Interior block of the admittance matrix is singular or badly conditioned.
class SingularInteriorError : public Error {
public:
    SingularInteriorError(const std::string& what, double condition)
        : Error(what), condition_(condition) {}

    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

/// Configuration that fails the small-signal stability requirement of an operation.
class UnstableConfigurationError : public Error {
public:
    using Error::Error;
};

/// Time-domain run aborted (non-finite state, voltage collapse).
class SimulationAbort : public Error {
public:
    SimulationAbort(const std::string& what, double last_valid_time)
        : Error(what), last_valid_time_(last_valid_time) {}

    double last_valid_time() const noexcept { return last_valid_time_; }

private:
    double last_valid_time_;
};

/// Input file or JSON block that does not match the expected schema.
class InputError : public Error {
public:
    using Error::Error;
};

}  // namespace cfc
