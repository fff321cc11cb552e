#pragma once

#include <stdexcept>
#include <string>

namespace pef {

// Invalid run configuration (bad flag values, unknown learner names).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data, graph files and tier files.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by long-running stages once a caller-supplied deadline has passed.
class TimeoutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pef
