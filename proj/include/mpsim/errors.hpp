#pragma once

#include <stdexcept>
#include <string>

namespace mpsim {

// Invalid caller input: bad parameters, malformed model text, mismatched
// dimensions. Maps to CLI exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A configurable resource cap was exceeded (fan-in enumeration, space count,
// trap-space node budget, arithmetic saturation). Maps to CLI exit code 2.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parse failure with 1-based position information.
class ParseError : public UsageError {
 public:
  ParseError(const std::string& message, int line, int column)
      : UsageError("line " + std::to_string(line) + ", column " +
                   std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace mpsim
