#include "bufchem/error.hpp"

namespace bufchem {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::AssumptionViolated: return "assumption_violated";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::Singular: return "singular";
    case ErrorKind::Consistency: return "consistency";
    case ErrorKind::NoTangency: return "no_tangency";
    case ErrorKind::Stiffness: return "stiffness";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace bufchem
