#pragma once

#include <Eigen/Dense>
#include <initializer_list>
#include <vector>

#include "sdaqt/ones_action.hpp"

namespace sdaqt {

// Square dense matrix backend.  Immutable value type; every operation returns
// a fresh matrix.  Inversion refuses matrices whose estimated condition
// number exceeds 1/(100*eps).
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(Eigen::MatrixXd m);
  static DenseMatrix Identity(Eigen::Index n);
  static DenseMatrix Zero(Eigen::Index n);
  static DenseMatrix FromRows(
      std::initializer_list<std::initializer_list<double>> rows);

  Eigen::Index order() const { return m_.rows(); }
  const Eigen::MatrixXd& mat() const { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  DenseMatrix operator+(const DenseMatrix& o) const;
  DenseMatrix operator-(const DenseMatrix& o) const;
  DenseMatrix operator*(const DenseMatrix& o) const;
  DenseMatrix scaled(double s) const;
  DenseMatrix inverse() const;

  double norm_inf() const;
  OnesAction ones_action() const;

  // Compression is the identity on the finite backend.
  DenseMatrix compressed() const { return *this; }
  DenseMatrix identity_like() const { return Identity(order()); }
  DenseMatrix zero_like() const { return Zero(order()); }

  // A - 1*u^T, with u zero-padded or truncated to the matrix order.
  DenseMatrix minus_ones_outer(const std::vector<double>& u) const;

 private:
  void check_same_order(const DenseMatrix& o) const;
  Eigen::MatrixXd m_;
};

}  // namespace sdaqt
