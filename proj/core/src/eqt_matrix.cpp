#include "sdaqt/eqt_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "sdaqt/errors.hpp"

namespace sdaqt {
namespace {

using nlohmann::json;

constexpr Eigen::Index kRowBlock = 256;

// arithmetic drops only numerically invisible coefficients; the instance
// threshold drives rank truncation and the explicit compressed() call
constexpr double kCoeffCut = std::numeric_limits<double>::epsilon();

std::vector<double> clean_limit(std::vector<double> v, double cut) {
  for (auto& x : v)
    if (std::abs(x) < cut) x = 0;
  while (!v.empty() && v.back() == 0) v.pop_back();
  return v;
}

std::vector<double> add_limits(const std::vector<double>& a,
                               const std::vector<double>& b, double sb) {
  std::vector<double> out(std::max(a.size(), b.size()), 0.0);
  for (size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) out[i] += sb * b[i];
  return out;
}

CompactCorrection scale_correction(const CompactCorrection& c, double s) {
  if (c.empty() || s == 0.0) return CompactCorrection();
  if (c.factored()) return CompactCorrection::from_factors(c.u() * s, c.w());
  return CompactCorrection::from_dense(c.dense() * s);
}

// cheap idempotent cleanup that never rotates stored factors, so a matrix
// that is already canonical passes through bit for bit
CompactCorrection light_compress(const CompactCorrection& c, double cut) {
  // extent trims use machine precision; only the rank cut is threshold-driven —
  // zeroing individual entries would perturb the singular spectrum
  const double ext = std::numeric_limits<double>::epsilon();
  if (c.empty()) return c;
  if (!c.factored()) {
    const Eigen::MatrixXd& d = c.dense();
    Eigen::Index rmax = 0, cmax = 0;
    for (Eigen::Index i = 0; i < d.rows(); ++i)
      for (Eigen::Index j = 0; j < d.cols(); ++j)
        if (std::abs(d(i, j)) >= ext) {
          rmax = std::max(rmax, i + 1);
          cmax = std::max(cmax, j + 1);
        }
    if (rmax == d.rows() && cmax == d.cols()) return c;
    if (rmax == 0 || cmax == 0) return CompactCorrection();
    return CompactCorrection::from_dense(d.topLeftCorner(rmax, cmax));
  }
  const Eigen::MatrixXd& u = c.u();
  const Eigen::MatrixXd& w = c.w();
  // drop factor columns below the relative singular-value cut
  Eigen::VectorXd cn = u.colwise().norm();
  const double topsv = cn.size() ? cn.maxCoeff() : 0.0;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < u.cols(); ++j)
    if (cn[j] > cut * std::max(topsv, 1e-300)) keep.push_back(j);
  if (keep.empty()) return CompactCorrection();
  Eigen::MatrixXd uk(u.rows(), (Eigen::Index)keep.size());
  Eigen::MatrixXd wk(w.rows(), (Eigen::Index)keep.size());
  for (size_t j = 0; j < keep.size(); ++j) {
    uk.col(j) = u.col(keep[j]);
    wk.col(j) = w.col(keep[j]);
  }
  double wrow = 0, urow = 0;
  for (Eigen::Index j = 0; j < wk.rows(); ++j) wrow = std::max(wrow, wk.row(j).norm());
  for (Eigen::Index i = 0; i < uk.rows(); ++i) urow = std::max(urow, uk.row(i).norm());
  Eigen::Index rext = 0, cext = 0;
  for (Eigen::Index i = 0; i < uk.rows(); ++i)
    if (uk.row(i).norm() * wrow >= ext) rext = i + 1;
  for (Eigen::Index j = 0; j < wk.rows(); ++j)
    if (wk.row(j).norm() * urow >= ext) cext = j + 1;
  if (rext == 0 || cext == 0) return CompactCorrection();
  if ((Eigen::Index)keep.size() == u.cols() && rext == uk.rows() && cext == wk.rows())
    return c;
  uk.conservativeResize(rext, uk.cols());
  wk.conservativeResize(cext, wk.cols());
  return CompactCorrection::from_factors(std::move(uk), std::move(wk));
}

}  // namespace

EqtMatrix::EqtMatrix(LaurentSymbol symbol, CompactCorrection correction,
                     std::vector<double> limit, double threshold)
    : symbol_(std::move(symbol)),
      correction_(std::move(correction)),
      limit_(std::move(limit)),
      threshold_(threshold) {
  if (!(threshold_ > 0) || !std::isfinite(threshold_))
    throw std::invalid_argument("threshold must be positive and finite");
  for (double v : limit_)
    if (!std::isfinite(v)) throw std::invalid_argument("limit row has non-finite entries");
}

EqtMatrix EqtMatrix::zero(double threshold) {
  return EqtMatrix(LaurentSymbol(), CompactCorrection(), {}, threshold);
}

EqtMatrix EqtMatrix::identity(double threshold) {
  return EqtMatrix(LaurentSymbol::one(), CompactCorrection(), {}, threshold);
}

EqtMatrix EqtMatrix::from_symbol(LaurentSymbol a, double threshold) {
  return EqtMatrix(a.compressed(kCoeffCut), CompactCorrection(), {}, threshold);
}

EqtMatrix EqtMatrix::operator+(const EqtMatrix& b) const {
  const double t = std::min(threshold_, b.threshold_);
  CorrectionBuilder cb;
  cb.add(correction_);
  cb.add(b.correction_);
  return EqtMatrix((symbol_ + b.symbol_).compressed(kCoeffCut), cb.finalize(t),
                   clean_limit(add_limits(limit_, b.limit_, 1.0), kCoeffCut), t);
}

EqtMatrix EqtMatrix::operator-(const EqtMatrix& b) const {
  const double t = std::min(threshold_, b.threshold_);
  CorrectionBuilder cb;
  cb.add(correction_);
  cb.add(scale_correction(b.correction_, -1.0));
  return EqtMatrix((symbol_ - b.symbol_).compressed(kCoeffCut), cb.finalize(t),
                   clean_limit(add_limits(limit_, b.limit_, -1.0), kCoeffCut), t);
}

EqtMatrix EqtMatrix::operator*(const EqtMatrix& b) const { return eqt_mul(*this, b); }

EqtMatrix EqtMatrix::scaled(double s) const {
  if (!std::isfinite(s)) throw std::invalid_argument("scale must be finite");
  std::vector<double> lim = limit_;
  for (auto& x : lim) x *= s;
  return EqtMatrix(symbol_.scaled(s).compressed(kCoeffCut),
                   light_compress(scale_correction(correction_, s), threshold_),
                   clean_limit(std::move(lim), kCoeffCut), threshold_);
}

EqtMatrix EqtMatrix::inverse() const { return eqt_inverse(*this); }

double EqtMatrix::norm_inf() const {
  const int lo = symbol_.lo(), hi = symbol_.hi();
  const Eigen::Index lv = (Eigen::Index)limit_.size();
  const Eigen::Index re = correction_.rows(), ce = correction_.cols();

  double vsum = 0;
  for (double v : limit_) vsum += std::abs(v);
  const double asymp = symbol_.l1() + vsum;

  // beyond istar every row carries the full symbol mass plus the limit mass
  const Eigen::Index istar =
      std::max<Eigen::Index>(re, lv + std::max<Eigen::Index>(hi, 0));
  if (istar == 0) return asymp;

  // prefix sums of |coefficients| for the symbol-only stretch of each row
  const auto& cs = symbol_.coeffs();
  std::vector<double> pre(cs.size() + 1, 0.0);
  for (size_t s = 0; s < cs.size(); ++s) pre[s + 1] = pre[s] + std::abs(cs[s]);
  auto band_mass = [&](long kl, long kh) {
    kl = std::max<long>(kl, lo);
    kh = std::min<long>(kh, hi);
    if (symbol_.empty() || kh < kl) return 0.0;
    return pre[kh - lo + 1] - pre[kl - lo];
  };

  double best = asymp;
  for (Eigen::Index i0 = 0; i0 < istar; i0 += kRowBlock) {
    const Eigen::Index n = std::min(kRowBlock, istar - i0);
    Eigen::MatrixXd blk;
    if (i0 < re) blk = correction_.row_block(i0, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      const Eigen::Index i = i0 + r;
      const Eigen::Index jmix = std::max(lv, i < re ? ce : 0);
      double s = 0;
      for (Eigen::Index j = 0; j < jmix; ++j) {
        double e = symbol_.coeff(static_cast<int>(i - j));
        if (j < lv) e += limit_[j];
        if (i < re && j < ce) e += blk(r, j);
        s += std::abs(e);
      }
      s += band_mass(lo, i - jmix);
      best = std::max(best, s);
    }
  }
  return best;
}

OnesAction EqtMatrix::ones_action() const {
  OnesAction oa;
  oa.scalar = symbol_.sum();
  for (double v : limit_) oa.scalar += v;
  std::vector<double> tail = symbol_.ones_tail();
  Eigen::VectorXd rs = correction_.row_sums();
  if ((Eigen::Index)tail.size() < rs.size()) tail.resize(rs.size(), 0.0);
  for (Eigen::Index i = 0; i < rs.size(); ++i) tail[i] += rs[i];
  oa.tail = std::move(tail);
  return oa;
}

EqtMatrix EqtMatrix::compressed() const {
  return EqtMatrix(symbol_.compressed(threshold_),
                   light_compress(correction_, threshold_),
                   clean_limit(limit_, threshold_), threshold_);
}

EqtMatrix EqtMatrix::minus_ones_outer(const std::vector<double>& u) const {
  std::vector<double> lim = add_limits(limit_, u, -1.0);
  return EqtMatrix(symbol_, correction_, clean_limit(std::move(lim), kCoeffCut),
                   threshold_);
}

Eigen::MatrixXd EqtMatrix::leading_block(Eigen::Index r, Eigen::Index c) const {
  Eigen::MatrixXd out = correction_.materialize(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j)
      out(i, j) += symbol_.coeff(static_cast<int>(i - j));
  for (Eigen::Index j = 0; j < std::min<Eigen::Index>(c, limit_.size()); ++j)
    out.col(j).array() += limit_[j];
  return out;
}

Eigen::VectorXd EqtMatrix::apply(const Eigen::VectorXd& x) const {
  if (!is_qt())
    throw std::logic_error("apply needs a quasi-Toeplitz matrix; the limit part "
                           "would spread over infinitely many rows");
  std::vector<double> xs(x.data(), x.data() + x.size());
  std::vector<double> ty = toeplitz_apply(symbol_, xs);
  Eigen::VectorXd ey = correction_.apply(x);
  const Eigen::Index n = std::max<Eigen::Index>((Eigen::Index)ty.size(), ey.size());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (size_t i = 0; i < ty.size(); ++i) out[(Eigen::Index)i] += ty[i];
  out.head(ey.size()) += ey;
  return out;
}

Eigen::VectorXd EqtMatrix::apply_transpose(const Eigen::VectorXd& x) const {
  std::vector<double> xs(x.data(), x.data() + x.size());
  std::vector<double> ty = toeplitz_apply(symbol_.reversed(), xs);
  Eigen::VectorXd ey = correction_.apply_transpose(x);
  double xsum = x.sum();
  const Eigen::Index n = std::max<Eigen::Index>(
      std::max<Eigen::Index>((Eigen::Index)ty.size(), ey.size()),
      (Eigen::Index)limit_.size());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (size_t i = 0; i < ty.size(); ++i) out[(Eigen::Index)i] += ty[i];
  out.head(ey.size()) += ey;
  for (size_t j = 0; j < limit_.size(); ++j) out[(Eigen::Index)j] += xsum * limit_[j];
  return out;
}

StructureStats EqtMatrix::structure_stats() const {
  const double mach = std::numeric_limits<double>::epsilon();
  StructureStats st;
  for (int k = std::max(symbol_.lo(), 1); k <= symbol_.hi(); ++k)
    if (std::abs(symbol_.coeff(k)) >= mach) st.lb = k;
  for (int k = std::min(symbol_.hi(), -1); k >= symbol_.lo(); --k)
    if (std::abs(symbol_.coeff(k)) >= mach) st.ub = -k;
  // stored dimensions: the correction keeps its full structural support, so
  // rows() and cols() are the honest size of the finite block
  st.rc = correction_.rows();
  st.cc = correction_.cols();
  st.rk = correction_.factored() ? correction_.stored_rank()
                                 : correction_.numerical_rank(threshold_);
  for (size_t j = 0; j < limit_.size(); ++j)
    if (std::abs(limit_[j]) >= mach) st.lim = (long)j + 1;
  return st;
}

std::string EqtMatrix::to_json() const {
  json j;
  j["threshold"] = threshold_;
  j["symbol"] = {{"offset_min", symbol_.lo()}, {"coefficients", symbol_.coeffs()}};
  json c;
  if (correction_.empty()) {
    c["storage"] = "empty";
  } else if (correction_.factored()) {
    c["storage"] = "factored";
    c["rows"] = correction_.rows();
    c["cols"] = correction_.cols();
    c["rank"] = correction_.stored_rank();
    std::vector<double> u, w;
    const auto& mu = correction_.u();
    const auto& mw = correction_.w();
    u.reserve(mu.size());
    for (Eigen::Index i = 0; i < mu.rows(); ++i)
      for (Eigen::Index k = 0; k < mu.cols(); ++k) u.push_back(mu(i, k));
    w.reserve(mw.size());
    for (Eigen::Index i = 0; i < mw.rows(); ++i)
      for (Eigen::Index k = 0; k < mw.cols(); ++k) w.push_back(mw(i, k));
    c["u"] = u;
    c["w"] = w;
  } else {
    c["storage"] = "dense";
    c["rows"] = correction_.rows();
    c["cols"] = correction_.cols();
    std::vector<double> vals;
    vals.reserve(correction_.dense().size());
    const auto& d = correction_.dense();
    for (Eigen::Index i = 0; i < d.rows(); ++i)
      for (Eigen::Index j2 = 0; j2 < d.cols(); ++j2) vals.push_back(d(i, j2));
    c["values"] = vals;
  }
  j["correction"] = c;
  j["limit"] = {{"values", limit_}};
  return j.dump(2);
}

EqtMatrix EqtMatrix::from_json(const std::string& text) {
  try {
    json j = json::parse(text);
    const double t = j.at("threshold").get<double>();
    const json& js = j.at("symbol");
    std::vector<double> coeffs = js.at("coefficients").get<std::vector<double>>();
    LaurentSymbol sym =
        coeffs.empty() ? LaurentSymbol()
                       : LaurentSymbol(js.at("offset_min").get<int>(), coeffs);
    const json& jc = j.at("correction");
    CompactCorrection corr;
    const std::string storage = jc.at("storage").get<std::string>();
    if (storage == "dense") {
      const Eigen::Index r = jc.at("rows").get<Eigen::Index>();
      const Eigen::Index c2 = jc.at("cols").get<Eigen::Index>();
      std::vector<double> vals = jc.at("values").get<std::vector<double>>();
      if ((Eigen::Index)vals.size() != r * c2)
        throw std::invalid_argument("correction value count mismatch");
      Eigen::MatrixXd d(r, c2);
      for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j2 = 0; j2 < c2; ++j2) d(i, j2) = vals[i * c2 + j2];
      corr = CompactCorrection::from_dense(std::move(d));
    } else if (storage == "factored") {
      const Eigen::Index r = jc.at("rows").get<Eigen::Index>();
      const Eigen::Index c2 = jc.at("cols").get<Eigen::Index>();
      const Eigen::Index k = jc.at("rank").get<Eigen::Index>();
      std::vector<double> u = jc.at("u").get<std::vector<double>>();
      std::vector<double> w = jc.at("w").get<std::vector<double>>();
      if ((Eigen::Index)u.size() != r * k || (Eigen::Index)w.size() != c2 * k)
        throw std::invalid_argument("correction factor size mismatch");
      Eigen::MatrixXd mu(r, k), mw(c2, k);
      for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index l = 0; l < k; ++l) mu(i, l) = u[i * k + l];
      for (Eigen::Index i = 0; i < c2; ++i)
        for (Eigen::Index l = 0; l < k; ++l) mw(i, l) = w[i * k + l];
      corr = CompactCorrection::from_factors(std::move(mu), std::move(mw));
    } else if (storage != "empty") {
      throw std::invalid_argument("unknown correction storage '" + storage + "'");
    }
    std::vector<double> lim = j.at("limit").at("values").get<std::vector<double>>();
    return EqtMatrix(std::move(sym), std::move(corr), std::move(lim), t);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed matrix json: ") + e.what());
  }
}

}  // namespace sdaqt
