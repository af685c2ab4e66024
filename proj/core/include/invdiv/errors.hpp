#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace invdiv {

// Argument outside the mathematical domain of an operation (x <= 0, NaN, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Vector arguments whose lengths disagree.
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Unknown catalog name or malformed specification string.
class ParseError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// An adaptive integrator ran out of its evaluation budget before meeting
// the requested tolerance. Divergent integrals usually end up here.
class BudgetExhausted : public std::runtime_error {
public:
  BudgetExhausted(const std::string& what, double partial_value, double error_estimate)
      : std::runtime_error(what), partial_value_(partial_value),
        error_estimate_(error_estimate) {}

  double partial_value() const noexcept { return partial_value_; }
  double error_estimate() const noexcept { return error_estimate_; }

private:
  double partial_value_;
  double error_estimate_;
};

// Model construction refused because a normalizing integral diverges.
class AssumptionViolated : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// All problems found while validating an experiment configuration.
class ConfigError : public std::invalid_argument {
public:
  explicit ConfigError(std::vector<std::string> problems);

  const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
  std::vector<std::string> problems_;
};

}  // namespace invdiv
