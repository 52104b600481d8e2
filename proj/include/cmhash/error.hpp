#pragma once

#include <stdexcept>
#include <string>

namespace cmhash {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid arguments, shape mismatches, bad configuration values.
struct InputError : Error {
  using Error::Error;
};

/// Malformed or inconsistent dataset / checkpoint contents.
struct DataError : Error {
  using Error::Error;
};

/// Non-finite values, divergence, numeric breakdown.
struct NumericError : Error {
  using Error::Error;
};

/// Filesystem failures (open, read, write).
struct IoError : Error {
  using Error::Error;
};

}  // namespace cmhash
