#pragma once

#include <stdexcept>
#include <string>

namespace liectrl {

/// Malformed or out-of-contract user input (dimensions, config files, ...).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical kernel (eigensolver, least squares, ...) failed to converge.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An internal invariant that should hold by theory was violated beyond tolerance.
class InconsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A trajectory left the configured safety region.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested feature outside the supported problem class (e.g. nilpotency class > 4).
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace liectrl
