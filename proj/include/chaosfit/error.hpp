#pragma once

#include <stdexcept>
#include <string>

namespace chaosfit {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: out-of-range arguments, malformed files, inconsistent shapes.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Non-finite state, integrator blow-up, optimizer divergence.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// An operation applied outside its domain, e.g. lowering a zero entry.
class UndefinedError : public Error {
public:
    using Error::Error;
};

}  // namespace chaosfit
