#pragma once

#include <stdexcept>
#include <string>

namespace admitforge {

// Raised for numerical failures and violated preconditions in the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or missing configuration, file, or command-line input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace admitforge
