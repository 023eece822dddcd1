#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "sdaqt/eqt_matrix.hpp"
#include "sdaqt/fft.hpp"

namespace sdaqt {
namespace {

constexpr Eigen::Index kDenseHankelArea = 1 << 16;

// y_i = sum_k h[i+k] x_k for i < len(h), via a convolution with x reversed.
// The kernel spectrum is transformed once and reused: the randomized sampler
// below applies the same two kernels hundreds of times and is FFT-bound.
class HankelOp {
 public:
  HankelOp(const std::vector<double>& h, std::size_t pad)
      : hat_(fft::real_spectrum(h, pad)), len_(h.size()) {}

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
    std::vector<double> xr(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) xr[i] = x[x.size() - 1 - i];
    const std::size_t base = xr.size() - 1;
    std::vector<double> c = fft::convolve_spectrum(hat_, xr, base + len_);
    Eigen::VectorXd y((Eigen::Index)len_);
    for (std::size_t i = 0; i < len_; ++i) y[(Eigen::Index)i] = c[base + i];
    return y;
  }

 private:
  std::vector<std::complex<double>> hat_;
  std::size_t len_;
};

// applies each column of m through the semi-infinite Toeplitz operator T(sym)
Eigen::MatrixXd toeplitz_cols(const LaurentSymbol& sym, const Eigen::MatrixXd& m) {
  if (sym.empty() || m.size() == 0) return Eigen::MatrixXd();
  const long out_rows = (long)sym.hi() + m.rows();
  if (out_rows <= 0) return Eigen::MatrixXd();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(out_rows, m.cols());
  std::vector<double> x(m.rows());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) x[i] = m(i, j);
    std::vector<double> y = toeplitz_apply(sym, x);
    for (size_t i = 0; i < y.size(); ++i) out((Eigen::Index)i, j) = y[i];
  }
  return out;
}

// product of the two Hankel blocks cut off by the semi-infinite window:
// C_{ij} = sum_k ka[i+k] kb[k+j]; the caller subtracts it from T(ab)
struct HankelCross {
  Eigen::MatrixXd dense;    // valid when factored is empty
  Eigen::MatrixXd u, w;     // factored form with the sign already folded in
  bool use_factors = false;
  bool empty = true;
};

HankelCross hankel_cross(const LaurentSymbol& a, const LaurentSymbol& b,
                         double threshold) {
  HankelCross out;
  if (a.hi() < 1 || b.lo() > -1) return out;
  const Eigen::Index rows = a.hi();
  const Eigen::Index cols = -b.lo();
  std::vector<double> ka(rows), kb(cols);
  for (Eigen::Index t = 0; t < rows; ++t) ka[t] = a.coeff((int)t + 1);
  for (Eigen::Index t = 0; t < cols; ++t) kb[t] = b.coeff(-(int)t - 1);

  if (rows * cols <= kDenseHankelArea) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) {
        const Eigen::Index klim = std::min(rows - i, cols - j);
        double s = 0;
        for (Eigen::Index k = 0; k < klim; ++k) s += ka[i + k] * kb[k + j];
        d(i, j) = -s;
      }
    out.dense = std::move(d);
    out.use_factors = false;
    out.empty = false;
    return out;
  }

  // randomized range finding with one power iteration; the kernels decay
  // exponentially, so the sample spectrum tails off fast and doubling the
  // sample count quickly passes the singular-value cut
  const std::size_t pad =
      fft::next_pow2(2 * (std::size_t)std::max(rows, cols));
  HankelOp ha(ka, pad), hb(kb, pad);
  auto apply_c = [&](const Eigen::MatrixXd& x) {
    Eigen::MatrixXd y(rows, x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      y.col(j) = ha.apply(hb.apply(x.col(j)));
    return y;
  };
  auto apply_ct = [&](const Eigen::MatrixXd& x) {
    Eigen::MatrixXd y(cols, x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      y.col(j) = hb.apply(ha.apply(x.col(j)));
    return y;
  };

  const std::uint64_t seed = 0x9E3779B97F4A7C15ull ^
                             ((std::uint64_t)rows * 0x100000001B3ull) ^
                             ((std::uint64_t)cols * 0xC6A4A7935BD1E995ull);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  const Eigen::Index full = std::min(rows, cols);
  Eigen::Index s = std::min<Eigen::Index>(32, full);
  while (true) {
    Eigen::MatrixXd omega(cols, s);
    for (Eigen::Index i = 0; i < cols; ++i)
      for (Eigen::Index j = 0; j < s; ++j) omega(i, j) = nd(rng);
    Eigen::MatrixXd y = apply_c(omega);
    for (int pw = 0; pw < 1; ++pw) {
      Eigen::HouseholderQR<Eigen::MatrixXd> qr0(y);
      Eigen::MatrixXd q0 = Eigen::MatrixXd::Identity(rows, s);
      q0 = qr0.householderQ() * q0;
      y = apply_c(apply_ct(q0));
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
    Eigen::MatrixXd q = Eigen::MatrixXd::Identity(rows, s);
    q = qr.householderQ() * q;
    Eigen::MatrixXd bt = apply_ct(q);  // cols x s, equals C^T Q
    Eigen::BDCSVD<Eigen::MatrixXd> svd(bt, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double top = sv.size() ? sv[0] : 0.0;
    const bool resolved = (s == full) || (sv.size() && sv[sv.size() - 1] <=
                                          threshold * std::max(top, 1e-300));
    if (resolved) {
      Eigen::Index keep = 0;
      for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > threshold * std::max(top, 1e-300)) keep = i + 1;
      if (keep == 0) return out;  // empty
      // C ~ Q * bt^T = Q * (V S U^T): fold sign and singular values left
      out.u = -(q * svd.matrixV().leftCols(keep)) * sv.head(keep).asDiagonal();
      out.w = svd.matrixU().leftCols(keep);
      out.use_factors = true;
      out.empty = false;
      return out;
    }
    s = std::min(full, 2 * s);
  }
}

}  // namespace

EqtMatrix eqt_mul(const EqtMatrix& a, const EqtMatrix& b) {
  const double t = std::min(a.threshold(), b.threshold());
  const LaurentSymbol& sa = a.symbol();
  const LaurentSymbol& sb = b.symbol();
  const CompactCorrection& ea = a.correction();
  const CompactCorrection& eb = b.correction();

  LaurentSymbol prod = sa * sb;
  CorrectionBuilder cb;

  HankelCross hc = hankel_cross(sa, sb, t);
  if (!hc.empty) {
    if (hc.use_factors)
      cb.add_factors(std::move(hc.u), std::move(hc.w));
    else
      cb.add_dense(hc.dense);
  }

  if (!eb.empty() && !sa.empty()) {
    auto [ub, wb] = eb.factor_view();
    Eigen::MatrixXd u2 = toeplitz_cols(sa, ub);
    if (u2.size()) cb.add_factors(std::move(u2), std::move(wb));
  }
  if (!ea.empty() && !sb.empty()) {
    auto [ua, wa] = ea.factor_view();
    Eigen::MatrixXd w2 = toeplitz_cols(sb.reversed(), wa);
    if (w2.size()) cb.add_factors(std::move(ua), std::move(w2));
  }
  if (!ea.empty() && !eb.empty()) {
    auto [ua, wa] = ea.factor_view();
    auto [ub, wb] = eb.factor_view();
    const Eigen::Index l = std::min(wa.rows(), ub.rows());
    if (l > 0) {
      Eigen::MatrixXd core = wa.topRows(l).transpose() * ub.topRows(l);
      cb.add_factors(ua * core, std::move(wb));
    }
  }
  if (!b.limit().empty()) {
    Eigen::VectorXd vb = Eigen::Map<const Eigen::VectorXd>(b.limit().data(),
                                                           (Eigen::Index)b.limit().size());
    std::vector<double> ta = sa.ones_tail();
    if (!ta.empty()) {
      Eigen::VectorXd tv = Eigen::Map<const Eigen::VectorXd>(ta.data(), (Eigen::Index)ta.size());
      cb.add_outer(tv, vb);
    }
    if (!ea.empty()) cb.add_outer(ea.row_sums(), vb);
  }

  std::vector<double> lim;
  {
    // limit rows: a(1) * v_b plus v_a^T B, which apply_transpose assembles
    const size_t nb = b.limit().size();
    Eigen::VectorXd acc = Eigen::VectorXd::Zero((Eigen::Index)nb);
    for (size_t j = 0; j < nb; ++j) acc[(Eigen::Index)j] = sa.sum() * b.limit()[j];
    if (!a.limit().empty()) {
      Eigen::VectorXd va = Eigen::Map<const Eigen::VectorXd>(a.limit().data(),
                                                             (Eigen::Index)a.limit().size());
      Eigen::VectorXd vb2 = b.apply_transpose(va);
      if (vb2.size() > acc.size()) {
        Eigen::VectorXd grown = Eigen::VectorXd::Zero(vb2.size());
        grown.head(acc.size()) = acc;
        acc = std::move(grown);
      }
      acc.head(vb2.size()) += vb2;
    }
    lim.assign(acc.data(), acc.data() + acc.size());
    // coefficient cleanup sits at machine precision; t only drives rank cuts
    const double cut = std::numeric_limits<double>::epsilon();
    for (auto& x : lim)
      if (std::abs(x) < cut) x = 0;
    while (!lim.empty() && lim.back() == 0) lim.pop_back();
  }

  return EqtMatrix(prod.compressed(std::numeric_limits<double>::epsilon()),
                   cb.finalize(t), std::move(lim), t);
}

}  // namespace sdaqt
