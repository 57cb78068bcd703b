#pragma once

#include <stdexcept>
#include <string>

namespace addbo {

// Precondition violated by the caller (bad shapes, out-of-range indices, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A table, clique or domain would exceed a configured size limit.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Factorization failure, negative variance beyond tolerance, non-finite values.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Cached state no longer matches the inputs it is used with.
class InvalidState : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Internal consistency check failed (e.g. acquisition terms not covered by a tree).
class InconsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace addbo
