#pragma once

#include <stdexcept>
#include <string>

namespace budgetid {

/// Failure categories surfaced by the library. The CLI maps them to exit codes.
enum class ErrorKind {
  InvalidParameter,     // value outside a family's domain
  DegenerateInstance,   // instance on the boundary between answers
  InvalidWeights,       // not a point of the (interior) simplex
  Unsupported,          // task / family / size combination not handled
  InvalidInput,         // malformed arguments
  InvalidConstruction,  // hard-instance construction violates its invariants
  Precondition,         // hypothesis of a bound does not hold
  OptimizerFailure,     // numerical solver did not converge
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace budgetid
