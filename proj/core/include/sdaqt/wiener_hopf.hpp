#pragma once

#include "sdaqt/laurent_symbol.hpp"

namespace sdaqt {

// Canonical factorization a(z) = minus(z) * plus(z) of a symbol that never
// vanishes on the unit circle and has winding number zero.  plus carries
// offsets >= 0 and is zero-free in the closed unit disc; minus carries
// offsets <= 0 and is zero-free outside the open disc.  The reciprocal
// factors are computed on the same grid, so T(a)^{-1} = T(plus_inv) *
// T(minus_inv) up to the recorded residual.
struct WienerHopfFactors {
  LaurentSymbol plus;
  LaurentSymbol minus;
  LaurentSymbol plus_inv;
  LaurentSymbol minus_inv;
  int grid = 0;            // accepted grid size
  double resynthesis = 0;  // l1 error of minus*plus - a
};

// Winding number of a around the origin by the argument principle on a grid
// (4096 points, doubled whenever adjacent phase steps are ambiguous).
// Throws SpectralError if the symbol (nearly) vanishes on the circle.
int winding_number(const LaurentSymbol& a);

// Log-splitting spectral factorization with grid doubling until both the
// coefficient tails and the resynthesis residual fall below the tolerance.
// Throws SpectralError (symbol vanishes), NotInvertibleError (winding != 0)
// or NoFactorizationError (no decaying factors within the grid cap).
WienerHopfFactors wiener_hopf_factorize(const LaurentSymbol& a,
                                        double drop = 1e-16);

}  // namespace sdaqt
