#pragma once

#include <stdexcept>
#include <string>

namespace sdaqt {

// Base class for every failure this library reports on purpose.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

// A pivot or update became numerically singular; the iteration cannot proceed.
class BreakdownError : public SolverError {
 public:
  explicit BreakdownError(const std::string& what) : SolverError(what) {}
};

// A symbol vanishes (or nearly vanishes) somewhere on the unit circle.
class SpectralError : public BreakdownError {
 public:
  explicit SpectralError(const std::string& what) : BreakdownError(what) {}
};

// A symbol has nonzero winding number, so the operator has no inverse in the
// algebra even though the symbol never vanishes on the circle.
class NotInvertibleError : public BreakdownError {
 public:
  explicit NotInvertibleError(const std::string& what) : BreakdownError(what) {}
};

// Grid doubling hit its cap without producing decaying factor coefficients.
class NoFactorizationError : public BreakdownError {
 public:
  explicit NoFactorizationError(const std::string& what)
      : BreakdownError(what) {}
};

// The 2n x 2n pencil cannot be carried to first standard form: [N1, M2] is
// numerically singular.
class NotReducibleError : public SolverError {
 public:
  explicit NotReducibleError(const std::string& what) : SolverError(what) {}
};

// Scalar quadratic roots tie in modulus beyond tolerance; no branch can be
// selected for the solution symbol.
class BranchAmbiguousError : public SolverError {
 public:
  explicit BranchAmbiguousError(const std::string& what) : SolverError(what) {}
};

// A candidate that must be (sub)stochastic is not.
class NotSubstochasticError : public SolverError {
 public:
  explicit NotSubstochasticError(const std::string& what)
      : SolverError(what) {}
};

// A model file or model datum violates the random-walk constraints.
class ModelError : public SolverError {
 public:
  explicit ModelError(const std::string& what) : SolverError(what) {}
};

// An oracle was asked about a problem outside its contract.
class OracleError : public SolverError {
 public:
  explicit OracleError(const std::string& what) : SolverError(what) {}
};

}  // namespace sdaqt
