#pragma once

#include <stdexcept>
#include <string>

namespace npdisks {

/// Precondition violated (parameter outside its admissible range).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Evaluation at a point where a map or multiplier is singular.
class SingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Point on the open segment (-alpha, alpha) of the x1-axis.
class BranchCutError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Point at one of the two corners (+-alpha, 0).
class CornerError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Point expected on an arc of the boundary but is not.
class OffBoundaryError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Two grid-based objects do not share the same grid.
class GridMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Adaptive quadrature failed to reach its tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved_error() const { return achieved_; }

 private:
  double achieved_;
};

/// Malformed or inconsistent configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace npdisks
