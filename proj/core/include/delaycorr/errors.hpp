#pragma once

#include <stdexcept>
#include <string>

namespace delaycorr {

// Exception families map one-to-one onto CLI exit codes (2, 3, 4).

/// Bad configuration, bad parameters, or a violated precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input data that cannot be processed (malformed, empty, degenerate).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The optimizer could not produce any usable fit.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace delaycorr
