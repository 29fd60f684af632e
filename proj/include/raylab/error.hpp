#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace raylab {

enum class ErrorKind {
  InvalidArgument,
  OnBoundary,
  StepTooSmall,
  NoConvergence,
  SingularJacobian,
  AtPole,
  Diverged,
  SeedNotConfigured,
  SimplicityViolation,
  TailTooShort,
  NearEndpoint,
  NoReturn,
  Precondition,
  DegenerateTheta,
  WitnessNotFound,
  MalformedInput,
  PluginError,
};

std::string_view to_string(ErrorKind kind);

// Every failure in the library surfaces as an Error. what() is a single line
// prefixed with the kind name so that callers can parse it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace raylab
