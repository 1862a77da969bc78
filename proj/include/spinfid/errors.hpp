#pragma once

#include <stdexcept>
#include <string>

namespace spinfid {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of an operation.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// A problem is too large for the requested method (e.g. exact diagonalization at L > 12).
class CapacityError : public Error {
  public:
    using Error::Error;
};

/// An iterative eigensolver did not reach its tolerance.
class ConvergenceError : public Error {
  public:
    ConvergenceError(const std::string &what, long step) : Error(what), step_(step) {}
    [[nodiscard]] long step() const noexcept { return step_; }

  private:
    long step_;
};

/// Two ground-state records cannot be contracted against each other.
class IncompatibleError : public Error {
  public:
    using Error::Error;
};

/// A discrete maximum sits on the edge of the sampled window.
class BoundaryError : public Error {
  public:
    using Error::Error;
};

/// A least-squares fit failed from every starting point.
class FitError : public Error {
  public:
    using Error::Error;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

class IoError : public Error {
  public:
    using Error::Error;
};

/// Malformed tabular input. Rows and columns are 1-based; row 1 is the header.
class ParseError : public Error {
  public:
    ParseError(const std::string &what, long row, long column)
        : Error(what + " (row " + std::to_string(row) + ", column " + std::to_string(column) + ")"), row_(row),
          column_(column) {}
    [[nodiscard]] long row() const noexcept { return row_; }
    [[nodiscard]] long column() const noexcept { return column_; }

  private:
    long row_;
    long column_;
};

} // namespace spinfid
