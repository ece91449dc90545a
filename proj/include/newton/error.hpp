#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace newton {

// Every error the library raises derives from Error; the CLI maps the
// concrete type onto its exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: out-of-domain arguments, malformed specs, conflicting config.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Observation or parameter outside the kernel's declared domain.
class DomainError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Two measures whose layouts (grid window / atom list) do not match.
class StructuralError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Asymptotic machinery asked for a schedule it cannot serve (explicit
/// schedules, beta = 1/2).
class UnsupportedScheduleError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

/// The predictive density of an observation underflowed to zero.
class DegenerateEvidenceError : public NumericalError {
public:
    DegenerateEvidenceError(double x, std::size_t index, const std::string& what)
        : NumericalError(what), x_(x), index_(index) {}

    double observation() const noexcept { return x_; }
    /// Position of the offending observation in the fitted stream (0 when
    /// raised by a single update).
    std::size_t index() const noexcept { return index_; }

private:
    double x_;
    std::size_t index_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace newton
