#pragma once

#include <stdexcept>
#include <string>

namespace lgd {

// Base of every error raised by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad user input: unreadable files, malformed rows, window underflow.
class InputError : public Error {
public:
    using Error::Error;
};

// Argument outside the domain of a closed-form expression.
class DomainError : public Error {
public:
    using Error::Error;
};

// Model parameters violating the structural constraints (attracting left
// boundary, mu0 >= mu, 0 < R_d < alpha, ...).
class InvalidParameters : public DomainError {
public:
    using DomainError::DomainError;
};

// A numerical routine failed: root bracketing, Laplace inversion, truncation.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

// A calibration candidate (or the whole alpha grid) is infeasible.
class CalibrationInfeasible : public Error {
public:
    using Error::Error;
};

}  // namespace lgd
