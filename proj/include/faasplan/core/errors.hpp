#pragma once

#include <stdexcept>
#include <string>

namespace faasplan {

/// Base of every error raised by the library. The CLI maps the concrete
/// subclasses onto process exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The queueing model cannot be built or has no steady state (unstable
/// chain, offered load at or above capacity).
class ModelError : public Error {
public:
    using Error::Error;
};

/// An iterative numerical method failed to converge or a linear system was
/// singular.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// The requested quantity does not exist for the given inputs (for example a
/// hit rate of 1 requires an infinite idle time).
class Infeasible : public Error {
public:
    using Error::Error;
};

/// A configuration document violates its schema.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace faasplan
