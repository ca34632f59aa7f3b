#pragma once

#include <stdexcept>
#include <string>

namespace pabf {

// Invalid arguments or configuration: the caller asked for something
// the contract does not allow.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input data that cannot be processed (malformed files, degenerate
// regions, mismatched headers).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pabf
