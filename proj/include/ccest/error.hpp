#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ccest {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside a function's mathematical domain (e.g. negative z).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent or out-of-range configuration, labels or specs.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Required argument missing or malformed.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// The weighted problem has no information left (all weights zero, n too small).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver failed to make progress; carries the objective trace.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> trace)
      : Error(what), trace_(std::move(trace)) {}
  const std::vector<double>& trace() const noexcept { return trace_; }

 private:
  std::vector<double> trace_;
};

/// Malformed input file; line is 1-based (0 when unknown).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ccest
