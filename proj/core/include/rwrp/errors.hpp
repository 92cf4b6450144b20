#pragma once

#include <stdexcept>
#include <string>

namespace rwrp {

/// Base class for all library errors. `kind()` is a stable, machine-readable tag.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message);
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// Malformed input: bad step sets, unnormalized probabilities, shape mismatches.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message, std::string field = {});
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A point requested inside conv(R) lies outside it.
class InfeasiblePointError : public Error {
 public:
  explicit InfeasiblePointError(const std::string& message);
};

/// A configured search bound or enumeration cap was hit.
class BoundExceededError : public Error {
 public:
  BoundExceededError(const std::string& message, long long bound);
  long long bound() const noexcept { return bound_; }

 private:
  long long bound_;
};

class ZeroProbabilityStepError : public Error {
 public:
  explicit ZeroProbabilityStepError(const std::string& message);
};

class ReducibleOperatorError : public Error {
 public:
  explicit ReducibleOperatorError(const std::string& message);
};

/// An iterative solver stopped before its tolerance. `gap()` is the last
/// certified error bound (duality gap, Collatz-Wielandt gap or residual).
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& message, double gap);
  double gap() const noexcept { return gap_; }

 private:
  double gap_;
};

class StateBudgetError : public Error {
 public:
  explicit StateBudgetError(const std::string& message);
};

/// Path integral requested for a corrector that is not closed-loop.
class NoClosedLoopError : public Error {
 public:
  explicit NoClosedLoopError(const std::string& message);
};

class NoPathError : public Error {
 public:
  explicit NoPathError(const std::string& message);
};

}  // namespace rwrp
