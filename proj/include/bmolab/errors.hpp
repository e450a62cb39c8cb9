#pragma once

#include <stdexcept>
#include <string>

namespace bmo {

// Exit codes used by the CLI; library exceptions map onto these.
enum ExitCode : int {
  exit_ok = 0,
  exit_validation = 2,
  exit_resolution = 3,
  exit_not_evaluable = 4,
};

// Bad parameters, malformed specs, violated preconditions.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::runtime_error(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// The requested computation cannot be resolved at the current grid scale.
// Carries the spacing that would make it feasible (0 when not applicable).
class ResolutionError : public std::runtime_error {
 public:
  explicit ResolutionError(const std::string& what, double suggested_spacing = 0.0)
      : std::runtime_error(what), suggested_spacing_(suggested_spacing) {}
  double suggested_spacing() const { return suggested_spacing_; }

 private:
  double suggested_spacing_;
};

// A sup-functional had no qualifying cubes. Distinct from the value 0.
class NotEvaluableError : public std::runtime_error {
 public:
  explicit NotEvaluableError(const std::string& what) : std::runtime_error(what) {}
};

// Two query points fall in different grid components of the domain.
class ComponentError : public std::runtime_error {
 public:
  explicit ComponentError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bmo
