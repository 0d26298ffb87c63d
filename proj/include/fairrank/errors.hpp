#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fairrank {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A calibration target could not be bracketed.
class CalibrationFailure : public Error {
public:
    CalibrationFailure(const std::string& what, double lower, double upper)
        : Error(what), lower_(lower), upper_(upper) {}

    double lower() const noexcept { return lower_; }
    double upper() const noexcept { return upper_; }

private:
    double lower_;
    double upper_;
};

/// An iterative solver hit its iteration cap.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual, std::size_t iterations)
        : Error(what), residual_(residual), iterations_(iterations) {}

    double residual() const noexcept { return residual_; }
    std::size_t iterations() const noexcept { return iterations_; }

private:
    double residual_;
    std::size_t iterations_;
};

class NumericError : public Error {
public:
    using Error::Error;
};

/// Raised by FA*IR re-ranking when a prefix cannot meet its minimum.
class ConstraintInfeasible : public Error {
public:
    ConstraintInfeasible(const std::string& what, std::size_t prefix)
        : Error(what), prefix_(prefix) {}

    /// 1-based prefix length of the first violated constraint.
    std::size_t prefix() const noexcept { return prefix_; }

private:
    std::size_t prefix_;
};

class UndefinedMetric : public Error {
public:
    using Error::Error;
};

/// Malformed input file; carries the 1-based line number (0 when not line specific).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line) : Error(what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace fairrank
