#pragma once

#include <stdexcept>
#include <string>

namespace ecgsym {

// Bad parameters or configuration (CLI exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Problems with the data itself: parse, label and validity failures
// (CLI exit code 2).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ecgsym
