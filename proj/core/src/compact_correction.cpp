#include "sdaqt/compact_correction.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sdaqt {
namespace {

constexpr Eigen::Index kRowBlock = 256;

void check_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) throw std::invalid_argument(std::string(what) + " has non-finite entries");
}

// Rows and columns whose entries all sit below the unit roundoff carry no
// information at the scales the solver works on; the stored extent after
// this trim is what the structure reports show.
constexpr double kTrimCut = 0.5 * std::numeric_limits<double>::epsilon();

// Trims trailing rows/columns below the unit roundoff.  Entries are never
// zeroed individually: that would add a perturbation whose singular values
// swamp the rank cut.
Eigen::MatrixXd trim_dense(const Eigen::MatrixXd& d) {
  const double cut = kTrimCut;
  Eigen::Index rmax = 0, cmax = 0;
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    for (Eigen::Index j = 0; j < d.cols(); ++j)
      if (std::abs(d(i, j)) >= cut) {
        rmax = std::max(rmax, i + 1);
        cmax = std::max(cmax, j + 1);
      }
  return d.topLeftCorner(rmax, cmax);
}

}  // namespace

CompactCorrection CompactCorrection::from_dense(Eigen::MatrixXd d) {
  check_finite(d, "correction block");
  CompactCorrection c;
  if (d.size() == 0) return c;
  c.dense_ = std::move(d);
  c.rows_ = c.dense_.rows();
  c.cols_ = c.dense_.cols();
  c.factored_ = false;
  return c;
}

CompactCorrection CompactCorrection::from_factors(Eigen::MatrixXd u, Eigen::MatrixXd w) {
  if (u.cols() != w.cols()) throw std::invalid_argument("factor rank mismatch");
  check_finite(u, "correction factor");
  check_finite(w, "correction factor");
  CompactCorrection c;
  if (u.size() == 0 || w.size() == 0) return c;
  c.u_ = std::move(u);
  c.w_ = std::move(w);
  c.rows_ = c.u_.rows();
  c.cols_ = c.w_.rows();
  c.factored_ = true;
  return c;
}

Eigen::Index CompactCorrection::stored_rank() const {
  if (empty()) return 0;
  return factored_ ? u_.cols() : std::min(rows_, cols_);
}

Eigen::MatrixXd CompactCorrection::materialize(Eigen::Index r, Eigen::Index c) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(r, c);
  if (empty()) return out;
  const Eigen::Index rr = std::min(r, rows_), cc = std::min(c, cols_);
  if (factored_)
    out.topLeftCorner(rr, cc) = u_.topRows(rr) * w_.topRows(cc).transpose();
  else
    out.topLeftCorner(rr, cc) = dense_.topLeftCorner(rr, cc);
  return out;
}

Eigen::MatrixXd CompactCorrection::row_block(Eigen::Index i0, Eigen::Index n) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, cols_);
  if (empty() || i0 >= rows_) return out;
  const Eigen::Index nn = std::min(n, rows_ - i0);
  if (factored_)
    out.topRows(nn) = u_.middleRows(i0, nn) * w_.transpose();
  else
    out.topRows(nn) = dense_.middleRows(i0, nn);
  return out;
}

Eigen::VectorXd CompactCorrection::apply(const Eigen::VectorXd& x) const {
  if (empty()) return Eigen::VectorXd::Zero(0);
  Eigen::VectorXd xs = Eigen::VectorXd::Zero(cols_);
  const Eigen::Index n = std::min<Eigen::Index>(x.size(), cols_);
  xs.head(n) = x.head(n);
  if (factored_) return u_ * (w_.transpose() * xs);
  return dense_ * xs;
}

Eigen::VectorXd CompactCorrection::apply_transpose(const Eigen::VectorXd& y) const {
  if (empty()) return Eigen::VectorXd::Zero(0);
  Eigen::VectorXd ys = Eigen::VectorXd::Zero(rows_);
  const Eigen::Index n = std::min<Eigen::Index>(y.size(), rows_);
  ys.head(n) = y.head(n);
  if (factored_) return w_ * (u_.transpose() * ys);
  return dense_.transpose() * ys;
}

Eigen::VectorXd CompactCorrection::row_sums() const {
  if (empty()) return Eigen::VectorXd::Zero(0);
  if (factored_) return u_ * w_.colwise().sum().transpose();
  return dense_.rowwise().sum();
}

double CompactCorrection::max_abs() const {
  if (empty()) return 0;
  if (!factored_) return dense_.cwiseAbs().maxCoeff();
  double m = 0;
  for (Eigen::Index i0 = 0; i0 < rows_; i0 += kRowBlock) {
    const Eigen::Index n = std::min(kRowBlock, rows_ - i0);
    m = std::max(m, (u_.middleRows(i0, n) * w_.transpose()).cwiseAbs().maxCoeff());
  }
  return m;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> CompactCorrection::factor_view() const {
  if (empty()) return {Eigen::MatrixXd(), Eigen::MatrixXd()};
  if (factored_) return {u_, w_};
  if (cols_ <= rows_)
    return {dense_, Eigen::MatrixXd::Identity(cols_, cols_)};
  return {Eigen::MatrixXd::Identity(rows_, rows_), dense_.transpose()};
}

Eigen::Index CompactCorrection::row_extent(double cut) const {
  if (empty()) return 0;
  Eigen::Index ext = 0;
  if (!factored_) {
    for (Eigen::Index i = 0; i < rows_; ++i)
      if (dense_.row(i).cwiseAbs().maxCoeff() >= cut) ext = i + 1;
    return ext;
  }
  for (Eigen::Index i0 = 0; i0 < rows_; i0 += kRowBlock) {
    const Eigen::Index n = std::min(kRowBlock, rows_ - i0);
    Eigen::VectorXd rowmax =
        (u_.middleRows(i0, n) * w_.transpose()).cwiseAbs().rowwise().maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i)
      if (rowmax[i] >= cut) ext = i0 + i + 1;
  }
  return ext;
}

Eigen::Index CompactCorrection::col_extent(double cut) const {
  if (empty()) return 0;
  Eigen::Index ext = 0;
  if (!factored_) {
    for (Eigen::Index j = 0; j < cols_; ++j)
      if (dense_.col(j).cwiseAbs().maxCoeff() >= cut) ext = j + 1;
    return ext;
  }
  for (Eigen::Index j0 = 0; j0 < cols_; j0 += kRowBlock) {
    const Eigen::Index n = std::min(kRowBlock, cols_ - j0);
    Eigen::VectorXd colmax =
        (w_.middleRows(j0, n) * u_.transpose()).cwiseAbs().rowwise().maxCoeff();
    for (Eigen::Index j = 0; j < n; ++j)
      if (colmax[j] >= cut) ext = j0 + j + 1;
  }
  return ext;
}

Eigen::Index CompactCorrection::numerical_rank(double rel) const {
  if (empty()) return 0;
  Eigen::VectorXd sv;
  if (factored_) {
    // singular values of U W^T with W orthonormal: those of U up to the
    // recompression rotation; recompute from the small Gram factorization
    Eigen::BDCSVD<Eigen::MatrixXd> svd(u_);
    sv = svd.singularValues();
  } else {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(dense_);
    sv = svd.singularValues();
  }
  if (sv.size() == 0 || sv[0] == 0) return 0;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > rel * sv[0]) r = i + 1;
  return r;
}

void CorrectionBuilder::add(const CompactCorrection& c) {
  if (c.empty()) return;
  auto [u, w] = c.factor_view();
  add_factors(std::move(u), std::move(w));
}

void CorrectionBuilder::add_dense(const Eigen::MatrixXd& d) {
  add(CompactCorrection::from_dense(d));
}

void CorrectionBuilder::add_factors(Eigen::MatrixXd u, Eigen::MatrixXd w) {
  if (u.cols() != w.cols()) throw std::invalid_argument("factor rank mismatch");
  if (u.size() == 0 || w.size() == 0) return;
  check_finite(u, "correction factor");
  check_finite(w, "correction factor");
  rows_ = std::max(rows_, u.rows());
  cols_ = std::max(cols_, w.rows());
  rank_ += u.cols();
  pieces_.push_back({std::move(u), std::move(w)});
}

void CorrectionBuilder::add_outer(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  add_factors(u, v);
}

CompactCorrection CorrectionBuilder::finalize(double threshold) const {
  if (pieces_.empty()) return CompactCorrection();

  // dense route when the summed block is genuinely small
  if (std::min(rows_, cols_) <= CompactCorrection::kDenseSide) {
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(rows_, cols_);
    for (const auto& p : pieces_)
      sum.topLeftCorner(p.u.rows(), p.w.rows()) += p.u * p.w.transpose();
    return CompactCorrection::from_dense(trim_dense(sum));
  }

  // concatenate factors, padded to the union extent
  Eigen::MatrixXd cu = Eigen::MatrixXd::Zero(rows_, rank_);
  Eigen::MatrixXd cw = Eigen::MatrixXd::Zero(cols_, rank_);
  Eigen::Index at = 0;
  for (const auto& p : pieces_) {
    cu.block(0, at, p.u.rows(), p.u.cols()) = p.u;
    cw.block(0, at, p.w.rows(), p.w.cols()) = p.w;
    at += p.u.cols();
  }

  // thin QR of both sides, SVD of the small core
  Eigen::HouseholderQR<Eigen::MatrixXd> qu(cu);
  Eigen::HouseholderQR<Eigen::MatrixXd> qw(cw);
  const Eigen::Index ku = std::min(rank_, rows_);
  const Eigen::Index kw = std::min(rank_, cols_);
  Eigen::MatrixXd ru = qu.matrixQR().topRows(ku).triangularView<Eigen::Upper>();
  Eigen::MatrixXd rw = qw.matrixQR().topRows(kw).triangularView<Eigen::Upper>();
  Eigen::MatrixXd core = ru * rw.transpose();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(core, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double top = sv.size() ? sv[0] : 0.0;
  Eigen::Index keep = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > threshold * std::max(top, 1e-300)) keep = i + 1;
  if (keep == 0) return CompactCorrection();

  Eigen::MatrixXd qfu = Eigen::MatrixXd::Identity(rows_, ku);
  qfu = qu.householderQ() * qfu;
  Eigen::MatrixXd qfw = Eigen::MatrixXd::Identity(cols_, kw);
  qfw = qw.householderQ() * qfw;

  Eigen::MatrixXd u = qfu * (svd.matrixU().leftCols(keep) * sv.head(keep).asDiagonal());
  Eigen::MatrixXd w = qfw * svd.matrixV().leftCols(keep);

  // trim rows/columns below the unit roundoff, judged on actual entries of
  // u*w^T (factor-norm bounds overestimate by orders of magnitude and would
  // keep noise).  Scanning backward from the far edge touches only the
  // trimmed fringe, so the boundary search stays cheap even for wide blocks.
  // The rank cut above is the only value-level truncation.
  Eigen::Index rext = 0, cext = 0;
  for (Eigen::Index i = u.rows(); i-- > 0;)
    if ((u.row(i) * w.transpose()).cwiseAbs().maxCoeff() >= kTrimCut) {
      rext = i + 1;
      break;
    }
  for (Eigen::Index j = w.rows(); j-- > 0;)
    if ((u * w.row(j).transpose()).cwiseAbs().maxCoeff() >= kTrimCut) {
      cext = j + 1;
      break;
    }
  if (rext == 0 || cext == 0) return CompactCorrection();
  u.conservativeResize(rext, keep);
  w.conservativeResize(cext, keep);

  if (std::min(rext, cext) <= CompactCorrection::kDenseSide)
    return CompactCorrection::from_dense(trim_dense(u * w.transpose()));
  return CompactCorrection::from_factors(std::move(u), std::move(w));
}

}  // namespace sdaqt
