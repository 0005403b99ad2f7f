#pragma once

#include <stdexcept>
#include <string>

namespace ulab {

/// Raised when a value cannot be certified at the precision it carries.
/// Distinct from a mathematical domain error: more digits would resolve it.
class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Division by zero, singular matrices, invalid field parameters.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed text input (fixtures, configs).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ulab
