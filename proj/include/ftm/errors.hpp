#pragma once

#include <stdexcept>
#include <string>

namespace ftm {

// Base class for every failure raised by the library. The CLI maps any
// Error to exit code 1; usage problems never reach this hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value outside the domain where a formula or operation is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Requested edge growth cannot be realized by any threshold.
class FeasibilityError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class ResourceLimitError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

class FitDegenerateError : public FitError {
 public:
  using FitError::FitError;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  explicit ParseError(const std::string& what) : ParseError(what, 0) {}

  // 1-based; 0 when the failure is not tied to a line.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace ftm
