#include "rwrp/errors.hpp"

#include <utility>

namespace rwrp {

Error::Error(std::string kind, const std::string& message)
    : std::runtime_error(message), kind_(std::move(kind)) {}

ValidationError::ValidationError(const std::string& message, std::string field)
    : Error("validation", message), field_(std::move(field)) {}

InfeasiblePointError::InfeasiblePointError(const std::string& message)
    : Error("infeasible_point", message) {}

BoundExceededError::BoundExceededError(const std::string& message, long long bound)
    : Error("bound_exceeded", message + " (bound " + std::to_string(bound) + ")"),
      bound_(bound) {}

ZeroProbabilityStepError::ZeroProbabilityStepError(const std::string& message)
    : Error("zero_probability_step", message) {}

ReducibleOperatorError::ReducibleOperatorError(const std::string& message)
    : Error("reducible_operator", message) {}

NonConvergenceError::NonConvergenceError(const std::string& message, double gap)
    : Error("nonconvergence", message), gap_(gap) {}

StateBudgetError::StateBudgetError(const std::string& message)
    : Error("state_budget", message) {}

NoClosedLoopError::NoClosedLoopError(const std::string& message)
    : Error("no_closed_loop", message) {}

NoPathError::NoPathError(const std::string& message) : Error("no_path", message) {}

}  // namespace rwrp
