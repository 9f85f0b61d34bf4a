#pragma once

#include <stdexcept>
#include <string>

namespace zetatrap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function (poles, branch cuts, ranges).
class DomainError : public Error {
  public:
    using Error::Error;
};

/// Curve that is not a regular, positively oriented closed parameterization.
class InvalidGeometry : public Error {
  public:
    using Error::Error;
};

/// Malformed or inconsistent input (bad sizes, duplicate nodes, too-coarse grids).
class InvalidInput : public Error {
  public:
    using Error::Error;
};

/// Extended-precision solve did not meet its residual bound; retry with more digits.
class PrecisionInsufficient : public Error {
  public:
    using Error::Error;
};

/// Two independent evaluation routes disagree beyond their tolerance.
class ConsistencyError : public Error {
  public:
    using Error::Error;
};

/// Dense linear algebra failure (singular matrix, size beyond budget).
class SolverError : public Error {
  public:
    using Error::Error;
};

/// Feature intentionally not supported (e.g. off-grid correction tables).
class NotSupported : public Error {
  public:
    using Error::Error;
};

/// Configuration / file parse failure. Carries the 1-based line when known.
class ParseError : public Error {
  public:
    ParseError(const std::string& what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const noexcept { return line_; }

  private:
    int line_;
};

} // namespace zetatrap
