#pragma once

#include <Eigen/Dense>

#include "sdaqt/dense_matrix.hpp"
#include "sdaqt/sda.hpp"

namespace sdaqt {

// 2n x 2n pencil (M, N) acting on stacked [top; bottom] blocks
struct DensePencil {
  Eigen::MatrixXd m, n;
};

// companion pencil of the quadratic equation: M = [[0, I], [-Am1, -A0]],
// N = [[I, 0], [0, A1]]
DensePencil companion_pencil(const DenseMatrix& am1, const DenseMatrix& a0,
                             const DenseMatrix& a1);

// Swaps the column spaces so the pencil reads ([E,0;-P,I], [I,-Q;0,F]).
// Throws NotReducibleError when the mixing block [N_left, M_right] is
// numerically singular.
Ssf1Pencil<DenseMatrix> reduce_to_ssf1(const DensePencil& pencil);

}  // namespace sdaqt
