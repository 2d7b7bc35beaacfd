#pragma once

#include <stdexcept>
#include <string>

namespace fracwell {

// Non-finite argument handed to a kernel or source evaluation.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Bracket not found, root solver stalled, non-finite quadrature.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A structural hypothesis is violated; `condition` names it, e.g. "g5".
struct ConditionViolation : std::runtime_error {
  ConditionViolation(std::string cond, const std::string& what)
      : std::runtime_error(what), condition(std::move(cond)) {}
  std::string condition;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fracwell
