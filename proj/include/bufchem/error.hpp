#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bufchem {

enum class ErrorKind {
  Domain,              // argument outside the function's domain
  Validation,          // malformed parameters or fractions
  AssumptionViolated,  // A2 (buffer admits a positive equilibrium) fails
  Degenerate,          // S_in sits on a break-even boundary
  Singular,            // non-removable singularity hit
  Consistency,         // two independent routes disagree
  NoTangency,          // F_alpha minimisation found no tangency
  Stiffness,           // integrator step size underflow
  Unsupported,         // configuration outside the modelled family
  Config,              // config file errors
  Io
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace bufchem
