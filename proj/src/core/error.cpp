#include "stocsens/core/error.hpp"

namespace stocsens {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kUnsupported: return "unsupported-feature";
    case ErrorKind::kSingularRiccati: return "singular-riccati";
    case ErrorKind::kIntegrationFailure: return "integration-failure";
    case ErrorKind::kConvergenceFailure: return "convergence-failure";
    case ErrorKind::kDegenerateProblem: return "degenerate-problem";
    case ErrorKind::kEllipticity: return "ellipticity";
    case ErrorKind::kQualification: return "qualification";
  }
  return "unknown";
}

}  // namespace stocsens
