#pragma once

#include <stdexcept>
#include <string>

namespace pktsched {

/// Bad input: malformed instance, invalid parameters, unknown names.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An exact-mode computation would exceed its configured size cap.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A guaranteed structural property failed to hold. Always a bug.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace pktsched
