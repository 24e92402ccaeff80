// Shared error taxonomy. Exit-code mapping lives in the CLI: runtime
// non-convergence -> 2, invalid mathematical request -> 3, usage -> 64.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dsod {

inline constexpr const char* kVersion = "dsod 1.0.0";

// A mathematically ill-posed request (divergent sum, singular point, ...).
struct MathDomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DivergentSum : MathDomainError {
  using MathDomainError::MathDomainError;
};

struct SingularPoint : MathDomainError {
  using MathDomainError::MathDomainError;
};

struct EpsilonTooSmall : MathDomainError {
  using MathDomainError::MathDomainError;
};

// Input violates a zero-mean precondition (configuration or test function).
struct ZeroMeanViolation : MathDomainError {
  using MathDomainError::MathDomainError;
};

struct SolveFailure : MathDomainError {
  using MathDomainError::MathDomainError;
};

// Iteration budget exhausted before reaching tolerance.
struct NonConvergence : std::runtime_error {
  long sweeps = 0;
  double residual = 0.0;
  NonConvergence(const std::string& msg, long sweeps_, double residual_)
      : std::runtime_error(msg), sweeps(sweeps_), residual(residual_) {}
};

// Bad flags / malformed config; maps to exit code 64.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Cooperative cancellation (SIGINT); partial artifacts are flushed by the CLI.
struct Interrupted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dsod
