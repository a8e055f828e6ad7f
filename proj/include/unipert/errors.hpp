#pragma once

#include <stdexcept>
#include <string>

namespace unipert {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the inputs was violated (bad config, excluded case, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Integration or a numerical kernel failed (determinant drift, sign change,
/// non-nilpotent input where nilpotency is required).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed field expression. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column)
      : Error(message + " at line " + std::to_string(line) + ", column " +
              std::to_string(column)),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace unipert
