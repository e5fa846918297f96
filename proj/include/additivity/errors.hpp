#pragma once

#include <stdexcept>
#include <string>

namespace additivity {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Layout has fewer than two rows or columns.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// The statistic's error degrees of freedom would be < 1.
class InsufficientDofError : public Error {
public:
    using Error::Error;
};

/// Data make a statistic undefined (zero main effects, perfect fit, ...).
class DegenerateDataError : public Error {
public:
    using Error::Error;
};

/// All residuals vanish, so the omega spectrum cannot be normalized.
class DegenerateSpectrumError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A supplied Monte Carlo critical value was computed for another setting.
class CalibrationMismatchError : public Error {
public:
    using Error::Error;
};

/// Too many resampled datasets were degenerate.
class ResamplingDegeneracyError : public Error {
public:
    using Error::Error;
};

/// One of the update denominators of the iterative fit collapsed.
class DivisionGuardError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line_(line),
          column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class CacheError : public Error {
public:
    using Error::Error;
};

}  // namespace additivity
