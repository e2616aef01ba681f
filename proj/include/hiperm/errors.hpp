#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hiperm {

/// Sizes or positions that do not match the instance size n.
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// An oracle answered with a score no secret could produce.
class InconsistencyError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Instrumented run detected a broken invariant against the known secret.
class InvariantViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// A solver exceeded the query cap imposed by the oracle.
class RunawayError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file; carries the offending 1-based line number (0 if unknown).
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

}  // namespace hiperm
