#pragma once

#include <stdexcept>
#include <string>

namespace twistlab {

// Base class for everything this library throws on purpose.  Numerical
// non-convergence is not reported through exceptions; solvers return their
// best iterate together with a converged flag.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Coordinate index outside [1, kMaxIndex], or a support larger than an
// engine can afford (exhaustive oracles, the interval DP).
class SupportTooLargeError : public Error {
 public:
  using Error::Error;
};

// restrict() called with an empty or inverted index range.
class InvalidRangeError : public Error {
 public:
  using Error::Error;
};

// A partition tree that violates the admissibility constraints.
class InadmissibleTreeError : public Error {
 public:
  using Error::Error;
};

// An operation that requires a nonzero input vector.
class ZeroVectorError : public Error {
 public:
  using Error::Error;
};

// Exact sign enumeration requested for more vectors than 2^n fits a budget.
class TooManyVectorsError : public Error {
 public:
  using Error::Error;
};

// iterated_log applied to an argument whose image drops below 1.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Two reports combined that do not describe the same space or tuple size.
class MismatchedInputsError : public Error {
 public:
  using Error::Error;
};

// Experiment name not in the registry.
class UnknownExperimentError : public Error {
 public:
  using Error::Error;
};

// A twisted-space vector whose support leaks outside the admissible window.
class SupportViolationError : public Error {
 public:
  using Error::Error;
};

}  // namespace twistlab
