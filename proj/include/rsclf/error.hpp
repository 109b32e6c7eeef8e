#pragma once

#include <stdexcept>
#include <string>

namespace rsclf {

// Base of every error thrown by the library. The CLI maps subclasses onto
// process exit codes: UsageError -> 1, DataError -> 2, NumericError -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments or configuration (unknown config keys, invalid ranges).
class UsageError : public Error {
 public:
  using Error::Error;
};

// Malformed input data: CSV rows, word lists, artifacts.
class DataError : public Error {
 public:
  using Error::Error;
};

// Training diverged or a numeric verification failed.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace rsclf
