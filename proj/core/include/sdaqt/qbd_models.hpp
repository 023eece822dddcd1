#pragma once

#include <array>
#include <string>

#include "sdaqt/eqt_matrix.hpp"
#include "sdaqt/laurent_symbol.hpp"

namespace sdaqt {

// Random walk in the quarter plane, homogeneous away from the axes.  The
// first coordinate is the level, the second the phase.  inner[di+1][dj+1]
// is the probability of the step (di, dj) from an interior state, and
// boundary_x[di+1][dj] the probability of (di, dj) from a state on the
// phase-zero boundary, dj in {0, 1}.
struct QuarterPlaneModel {
  std::string name;
  std::array<std::array<double, 3>, 3> inner{};
  std::array<std::array<double, 2>, 3> boundary_x{};
};

// entries nonnegative, inner and boundary rows each summing to one
void validate(const QuarterPlaneModel& m);

enum class SolutionClass {
  kQt,                     // level drift down: solution has no limit part
  kEqt,                    // level drift up: solution needs the limit part
  kNullRecurrentBoundary,  // balanced drift: critical case
};

const char* to_string(SolutionClass c);

// compares total up and down level probabilities at tolerance 1e-14
SolutionClass classify_drift(const QuarterPlaneModel& m);

// phase-direction symbol of the level-di transition block: offset +1 holds
// the phase-down probability, offset -1 the phase-up one
LaurentSymbol level_symbol(const QuarterPlaneModel& m, int di);

// transition block B_di as a quasi-Toeplitz matrix with its boundary row fix
EqtMatrix level_block(const QuarterPlaneModel& m, int di, double threshold);

struct QbdCoefficients {
  EqtMatrix am1, a0, a1;
};

// coefficients of the quadratic equation: A_{-1} = -B_{-1}, A_0 = I - B_0,
// A_1 = -B_1
QbdCoefficients build_coefficients(const QuarterPlaneModel& m,
                                   double threshold = EqtMatrix::kDefaultThreshold);

// Scalar symbol g with a1(z) g(z)^2 + a0(z) g(z) + am1(z) = 0 picking the
// smaller-modulus branch, by evaluation on roots-of-unity grids and
// interpolation; every accepted grid is cross-checked against per-node
// cyclic reduction and verified at off-grid points.  Throws
// BranchAmbiguousError when the branches cannot be separated.
LaurentSymbol compute_symbol_g(const QuarterPlaneModel& m);

// rank-one stochastic start: I/2 + ones e_1^T / 2
EqtMatrix make_gtilde_rank1(double threshold = EqtMatrix::kDefaultThreshold);

// Toeplitz start T(g) completed to unit row sums through its first column
// and limit entry
EqtMatrix make_gtilde_toeplitz(const LaurentSymbol& g,
                               double threshold = EqtMatrix::kDefaultThreshold);

// built-in models used across the tests and benchmarks
QuarterPlaneModel preset_model(const std::string& name);

// json model files; entries may be numbers or exact "p/q" strings
QuarterPlaneModel parse_model(const std::string& text);
QuarterPlaneModel load_model(const std::string& path);
std::string save_model(const QuarterPlaneModel& m);

}  // namespace sdaqt
