#pragma once

#include <stdexcept>
#include <string>

namespace evgate {

/// Malformed or inconsistent input data (files, cases, config values).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace evgate
