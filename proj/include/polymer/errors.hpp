#pragma once

#include <stdexcept>

namespace polymer {

/// A requested table, grid or enumeration would exceed the configured budget.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The operation is not defined for the given disorder family or parameters.
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace polymer
