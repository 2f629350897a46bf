#pragma once

#include <stdexcept>
#include <string>

namespace scengen {

/// Bad or inconsistent input data (malformed CSV, missing zone, shape mismatch).
/// Maps to exit code 1 in the command-line front end.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine could not produce a valid result (non-PD factor,
/// rank-deficient design that cannot be repaired). Maps to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace scengen
