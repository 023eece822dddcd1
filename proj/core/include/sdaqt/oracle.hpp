#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "sdaqt/dense_matrix.hpp"
#include "sdaqt/eqt_matrix.hpp"
#include "sdaqt/ssf1_reduction.hpp"

namespace sdaqt::oracle {

// leading block of an infinite matrix as a dense square matrix
DenseMatrix dense_truncation(const EqtMatrix& a, Eigen::Index n);

// Minimal nonnegative solution by the monotone fixed point from zero.
// Verifies elementwise monotonicity and nonnegativity along the way and
// throws OracleError if either fails, so it cannot silently agree with a
// wrong fast path.  Swapping am1 and a1 yields the dual solution.
DenseMatrix minimal_solution_oracle(const DenseMatrix& am1, const DenseMatrix& a0,
                                    const DenseMatrix& a1, double tol = 1e-13,
                                    long max_iter = 5000000);

// companion pencil transformed by the defect shift: rows mixed from the left
// by [[I, 0], [-A1 Gt, I]] and columns from the right by [[I, 0], [Gt, I]]
DensePencil transformed_pencil(const DenseMatrix& am1, const DenseMatrix& a0,
                               const DenseMatrix& a1, const DenseMatrix& gt);

// Largest block difference between reducing the transformed companion pencil
// to first structured form and the closed-form defect-corrected
// initialization; equality certifies the initialization formulas.
double pencil_equivalence_gap(const DenseMatrix& am1, const DenseMatrix& a0,
                              const DenseMatrix& a1, const DenseMatrix& gt);

struct DualPair {
  DenseMatrix y, z;
};

// deflating pair built from the dual minimal solution v under the shift gt
DualPair dual_subspace(const DenseMatrix& v, const DenseMatrix& gt);

// residual of the dual deflating relation on the transformed pencil:
// || M~ [Y; I] Z - N~ [Y; I] ||_inf
double dual_subspace_residual(const DenseMatrix& am1, const DenseMatrix& a0,
                              const DenseMatrix& a1, const DenseMatrix& gt,
                              const DenseMatrix& v);

// || M [I; X] - N [I; X] W ||_inf
double invariant_subspace_residual(const DensePencil& p, const DenseMatrix& x,
                                   const DenseMatrix& w);

// Distance between the spectrum of g - ones u^T and the spectrum of g with
// its eigenvalue nearest one replaced by zero, after sorted matching.
double brauer_spectrum_gap(const DenseMatrix& g, const Eigen::VectorXd& u);

double spectral_radius(const DenseMatrix& m);
// second largest eigenvalue modulus
double second_modulus(const DenseMatrix& m);

struct DenseQbd {
  DenseMatrix bm1, b0, b1;
};

struct DenseCoefficients {
  DenseMatrix am1, a0, a1;
};

// random stochastic transition blocks, biased toward the level-down block so
// the chain is positive recurrent with overwhelming probability
DenseQbd random_qbd(std::uint64_t seed, Eigen::Index n);

DenseCoefficients to_coefficients(const DenseQbd& q);

}  // namespace sdaqt::oracle
