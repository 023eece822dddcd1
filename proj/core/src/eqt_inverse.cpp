#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sdaqt/eqt_matrix.hpp"
#include "sdaqt/errors.hpp"
#include "sdaqt/wiener_hopf.hpp"

namespace sdaqt {
namespace {

// columns of m pushed through the operator, padded to a common height
Eigen::MatrixXd apply_cols(const EqtMatrix& a, const Eigen::MatrixXd& m) {
  std::vector<Eigen::VectorXd> cols(m.cols());
  Eigen::Index rows = 0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    cols[j] = a.apply(m.col(j));
    rows = std::max(rows, cols[j].size());
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) out.col(j).head(cols[j].size()) = cols[j];
  return out;
}

Eigen::MatrixXd apply_transpose_cols(const EqtMatrix& a, const Eigen::MatrixXd& m) {
  std::vector<Eigen::VectorXd> cols(m.cols());
  Eigen::Index rows = 0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    cols[j] = a.apply_transpose(m.col(j));
    rows = std::max(rows, cols[j].size());
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) out.col(j).head(cols[j].size()) = cols[j];
  return out;
}

}  // namespace

EqtMatrix eqt_inverse(const EqtMatrix& a) {
  const double t = a.threshold();
  if (a.symbol().empty())
    throw SpectralError("matrix with zero symbol has no bounded inverse");

  // Toeplitz part: T(s)^{-1} = T(1/plus) * T(1/minus), exact for the
  // triangular factors; the product rule supplies the Hankel correction.
  WienerHopfFactors wh = wiener_hopf_factorize(a.symbol(), std::min(1e-16, 0.1 * t));
  EqtMatrix inv = EqtMatrix::from_symbol(wh.plus_inv, t) *
                  EqtMatrix::from_symbol(wh.minus_inv, t);

  // finite correction folded in through the Woodbury identity
  if (!a.correction().empty()) {
    auto [u, w] = a.correction().factor_view();
    Eigen::MatrixXd x = apply_cols(inv, u);             // T^{-1} U
    Eigen::MatrixXd yt = apply_transpose_cols(inv, w);  // T^{-T} W
    const Eigen::Index k = u.cols();
    const Eigen::Index l = std::min(w.rows(), x.rows());
    Eigen::MatrixXd cap = Eigen::MatrixXd::Identity(k, k);
    cap.noalias() += w.topRows(l).transpose() * x.topRows(l);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(cap);
    if (lu.rcond() < 100.0 * std::numeric_limits<double>::epsilon())
      throw BreakdownError("correction update is numerically singular in inverse");
    // solve K^T Z^T = X^T so that Z = X K^{-1}
    Eigen::PartialPivLU<Eigen::MatrixXd> lut(cap.transpose().eval());
    Eigen::MatrixXd xk = -(lut.solve(x.transpose().eval())).transpose();
    inv = inv + EqtMatrix(LaurentSymbol(),
                          CompactCorrection::from_factors(std::move(xk), std::move(yt)),
                          {}, t);
  }

  // rank-one limit part folded in through Sherman-Morrison using the action
  // of the current inverse on the ones vector
  if (!a.limit().empty()) {
    const auto& v = a.limit();
    Eigen::VectorXd vv = Eigen::Map<const Eigen::VectorXd>(v.data(), (Eigen::Index)v.size());
    OnesAction oa = inv.ones_action();
    Eigen::VectorXd wrow = inv.apply_transpose(vv);
    double vsum = vv.sum();
    double denom = 1.0 + oa.scalar * vsum;
    for (size_t j = 0; j < v.size() && j < oa.tail.size(); ++j)
      denom += v[j] * oa.tail[j];
    if (std::abs(denom) < 1e3 * std::numeric_limits<double>::epsilon() *
                              (1.0 + std::abs(oa.scalar * vsum)))
      throw BreakdownError("limit update is numerically singular in inverse");
    Eigen::VectorXd tail = Eigen::VectorXd::Zero((Eigen::Index)oa.tail.size());
    for (size_t i = 0; i < oa.tail.size(); ++i) tail[(Eigen::Index)i] = oa.tail[i];
    CompactCorrection upd;
    if (tail.size() > 0 && wrow.size() > 0)
      upd = CompactCorrection::from_factors((-1.0 / denom) * tail, wrow);
    std::vector<double> lim(wrow.size());
    for (Eigen::Index j = 0; j < wrow.size(); ++j)
      lim[(size_t)j] = -(oa.scalar / denom) * wrow[j];
    inv = inv + EqtMatrix(LaurentSymbol(), std::move(upd), std::move(lim), t);
  }

  // the arithmetic above already canonicalizes every stored part
  return inv;
}

}  // namespace sdaqt
