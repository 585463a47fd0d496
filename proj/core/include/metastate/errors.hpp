#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace metastate {

/// Bad inputs: off-simplex vectors, out-of-range parameters, malformed config.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A global minimizer whose reduced Hessian is not strictly positive definite.
class NonDegeneracy1Violation : public std::runtime_error {
 public:
  NonDegeneracy1Violation(std::string what, double phi_value, double min_eigenvalue)
      : std::runtime_error(std::move(what)),
        phi_value(phi_value),
        min_eigenvalue(min_eigenvalue) {}
  double phi_value;
  double min_eigenvalue;
};

/// Two minimizers share the same stability vector; weights are undefined.
class NonDegeneracy2Violation : public std::runtime_error {
 public:
  NonDegeneracy2Violation(std::string what, std::size_t first, std::size_t second,
                          double distance)
      : std::runtime_error(std::move(what)),
        first(first),
        second(second),
        distance(distance) {}
  std::size_t first;
  std::size_t second;
  double distance;
};

class SolverDidNotConverge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact enumeration would exceed the configured budget.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(std::string what, std::uint64_t required, std::uint64_t budget)
      : std::runtime_error(std::move(what)), required(required), budget(budget) {}
  std::uint64_t required;
  std::uint64_t budget;
};

/// A scan interval on which the equal-depth gap does not change sign.
class NoBracket : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace metastate
