#pragma once

#include <stdexcept>
#include <string>

namespace fhdbc {

/// Root of the library's exception hierarchy. Each subclass maps onto one
/// CLI exit category.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched grid sizes or staggered index ranges.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// A logarithm argument left (-1, 1).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Right-hand side or iterate violates a mean/mass constraint.
class CompatibilityError : public Error {
 public:
  using Error::Error;
};

/// An iterative procedure did not converge. Carries the last residual.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fhdbc
