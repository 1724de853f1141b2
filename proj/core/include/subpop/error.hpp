#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace subpop {

/// A documented precondition of a library call was violated by the caller.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation produced or received a non-finite / undefined value.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input file could not be parsed. `row()` is 1-based over data rows, 0 when
/// the failure is not tied to a row (missing header, unreadable file).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t row = 0)
      : std::runtime_error(what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

}  // namespace subpop
