#include "sdaqt/dense_matrix.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "sdaqt/errors.hpp"

namespace sdaqt {

DenseMatrix::DenseMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols())
    throw std::invalid_argument("DenseMatrix: matrix must be square");
  if (!m_.allFinite())
    throw std::invalid_argument("DenseMatrix: entries must be finite");
}

DenseMatrix DenseMatrix::Identity(Eigen::Index n) {
  return DenseMatrix(Eigen::MatrixXd::Identity(n, n));
}

DenseMatrix DenseMatrix::Zero(Eigen::Index n) {
  return DenseMatrix(Eigen::MatrixXd::Zero(n, n));
}

DenseMatrix DenseMatrix::FromRows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd m(n, n);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    if (static_cast<Eigen::Index>(row.size()) != n)
      throw std::invalid_argument("DenseMatrix: ragged initializer");
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return DenseMatrix(std::move(m));
}

void DenseMatrix::check_same_order(const DenseMatrix& o) const {
  if (order() != o.order())
    throw std::invalid_argument("DenseMatrix: order mismatch");
}

DenseMatrix DenseMatrix::operator+(const DenseMatrix& o) const {
  check_same_order(o);
  return DenseMatrix(m_ + o.m_);
}

DenseMatrix DenseMatrix::operator-(const DenseMatrix& o) const {
  check_same_order(o);
  return DenseMatrix(m_ - o.m_);
}

DenseMatrix DenseMatrix::operator*(const DenseMatrix& o) const {
  check_same_order(o);
  return DenseMatrix(m_ * o.m_);
}

DenseMatrix DenseMatrix::scaled(double s) const { return DenseMatrix(m_ * s); }

DenseMatrix DenseMatrix::inverse() const {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m_);
  const double rcond = lu.rcond();
  if (!(rcond > 100.0 * std::numeric_limits<double>::epsilon()))
    throw BreakdownError("DenseMatrix: matrix numerically singular (rcond=" +
                         std::to_string(rcond) + ")");
  return DenseMatrix(lu.inverse());
}

double DenseMatrix::norm_inf() const {
  return m_.cwiseAbs().rowwise().sum().maxCoeff();
}

OnesAction DenseMatrix::ones_action() const {
  // the last row sum stands in for the asymptotic part, so deviation checks
  // against a target see exactly the finite row sums and nothing else
  OnesAction r;
  if (order() == 0) return r;
  Eigen::VectorXd s = m_.rowwise().sum();
  r.scalar = s[s.size() - 1];
  r.tail.resize(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) r.tail[i] = s[i] - r.scalar;
  return r;
}

DenseMatrix DenseMatrix::minus_ones_outer(const std::vector<double>& u) const {
  Eigen::MatrixXd m = m_;
  const Eigen::Index n = order();
  for (Eigen::Index j = 0; j < n && j < static_cast<Eigen::Index>(u.size());
       ++j)
    m.col(j).array() -= u[static_cast<std::size_t>(j)];
  return DenseMatrix(std::move(m));
}

}  // namespace sdaqt
