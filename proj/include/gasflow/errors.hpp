#pragma once

#include <stdexcept>
#include <string>

namespace gasflow {

// Malformed input: dimension mismatches, broken invariants, schema problems.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The simplex kernel could not make progress (cycling guard, singular basis).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A node, iteration or enumeration limit was hit before a certified answer.
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gasflow
