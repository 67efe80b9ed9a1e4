#include "budgetid/error.hpp"

namespace budgetid {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::DegenerateInstance: return "degenerate-instance";
    case ErrorKind::InvalidWeights: return "invalid-weights";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::InvalidConstruction: return "invalid-construction";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::OptimizerFailure: return "optimizer-failure";
  }
  return "unknown";
}

}  // namespace budgetid
