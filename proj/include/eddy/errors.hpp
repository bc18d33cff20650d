#pragma once

#include <stdexcept>
#include <string>

namespace eddy {

/// Invalid argument to a library routine (bad counts, points outside a domain, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Inconsistent patch layout, non-conforming spaces, disconnected regions.
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation was invoked on an object it does not apply to.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A local or coarse factorization failed; signals a gauging defect.
class NonsingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invariant violated inside the library.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace eddy
