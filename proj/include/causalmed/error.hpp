#pragma once

#include <stdexcept>
#include <string>

namespace causalmed {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed model specifications, unresolved variable names, bad configs.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Identification failures on the data at hand: rank-deficient designs,
// Condition-1 violations, weak instruments, insufficient sample size.
class IdentificationError : public Error {
 public:
  using Error::Error;
};

// File-system and stream failures.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace causalmed
