#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace amalgam {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual input; carries a 1-based position.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Input is well formed but violates a mathematical precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A configured size cap was hit; no partial answer is reported.
class CapExceeded : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace amalgam
