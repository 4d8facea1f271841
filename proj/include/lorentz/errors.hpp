#pragma once

#include <stdexcept>
#include <string>

namespace lorentz {

/// Caller violated an API precondition (mismatched events, bad sizes).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A coordinate tuple lies outside the chart's domain.
class DomainError : public std::domain_error {
 public:
  DomainError(const std::string& what, int coordinate)
      : std::domain_error(what), coordinate_(coordinate) {}
  /// Offending coordinate index, or -1 for a non-coordinate constraint.
  int coordinate() const noexcept { return coordinate_; }

 private:
  int coordinate_;
};

/// Metric matrix is numerically singular.
class DegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The requested physical configuration does not exist (e.g. no timelike
/// circular orbit at the requested radius).
class PhysicsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input violates a documented contract (non-timelike curve segment,
/// degraded geodesic, failed shooting).
class ContractError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operation not defined for this dimension or configuration.
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenario or integrator configuration is invalid.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace lorentz
