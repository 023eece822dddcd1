#include "sdaqt/ssf1_reduction.hpp"

#include <Eigen/LU>
#include <limits>
#include <stdexcept>

#include "sdaqt/errors.hpp"

namespace sdaqt {

DensePencil companion_pencil(const DenseMatrix& am1, const DenseMatrix& a0,
                             const DenseMatrix& a1) {
  const Eigen::Index n = am1.order();
  if (a0.order() != n || a1.order() != n)
    throw std::invalid_argument("order mismatch between coefficients");
  DensePencil p;
  p.m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  p.n = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  p.m.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  p.m.bottomLeftCorner(n, n) = -am1.mat();
  p.m.bottomRightCorner(n, n) = -a0.mat();
  p.n.topLeftCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  p.n.bottomRightCorner(n, n) = a1.mat();
  return p;
}

Ssf1Pencil<DenseMatrix> reduce_to_ssf1(const DensePencil& pencil) {
  if (pencil.m.rows() != pencil.m.cols() || pencil.n.rows() != pencil.n.cols() ||
      pencil.m.rows() != pencil.n.rows() || pencil.m.rows() % 2 != 0)
    throw std::invalid_argument("pencil blocks must be square of even order");
  const Eigen::Index n = pencil.m.rows() / 2;

  // mixing matrix: left half from N, right half from M
  Eigen::MatrixXd s(2 * n, 2 * n);
  s.leftCols(n) = pencil.n.leftCols(n);
  s.rightCols(n) = pencil.m.rightCols(n);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(s);
  if (lu.rcond() < 100.0 * std::numeric_limits<double>::epsilon())
    throw NotReducibleError("pencil cannot be brought to first structured form: "
                            "mixing block is numerically singular");

  Eigen::MatrixXd rhs(2 * n, 2 * n);
  rhs.leftCols(n) = pencil.m.leftCols(n);
  rhs.rightCols(n) = pencil.n.rightCols(n);
  Eigen::MatrixXd t = lu.solve(rhs);

  return {DenseMatrix(t.topLeftCorner(n, n)),
          DenseMatrix(t.bottomRightCorner(n, n)),
          DenseMatrix(-t.bottomLeftCorner(n, n)),
          DenseMatrix(-t.topRightCorner(n, n))};
}

}  // namespace sdaqt
