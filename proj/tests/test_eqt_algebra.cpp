#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "sdaqt/eqt_matrix.hpp"
#include "sdaqt/laurent_symbol.hpp"
#include "sdaqt/oracle.hpp"

using sdaqt::EqtMatrix;
using sdaqt::LaurentSymbol;

namespace {

// Random test matrix with geometrically decaying symbol tails, a small
// correction block and (optionally) a decaying limit row.  Diagonal dominance
// keeps these invertible for the suites that need it.
EqtMatrix random_eqt(unsigned seed, bool with_limit, double diag = 3.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> c;
  int lo = -6;
  for (int k = lo; k <= 8; ++k)
    c.push_back(k == 0 ? diag : 0.4 * dist(rng) * std::pow(0.5, std::abs(k)));
  LaurentSymbol sym(lo, c);

  Eigen::MatrixXd blk(5, 7);
  for (Eigen::Index i = 0; i < blk.rows(); ++i)
    for (Eigen::Index j = 0; j < blk.cols(); ++j) blk(i, j) = 0.3 * dist(rng);
  sdaqt::CorrectionBuilder cb;
  cb.add_dense(blk);

  std::vector<double> lim;
  if (with_limit)
    for (int j = 0; j < 9; ++j) lim.push_back(0.2 * dist(rng) * std::pow(0.6, j));
  return EqtMatrix(sym, cb.finalize(1e-15), lim, 1e-15);
}

// window beyond which rows < n of the matrix are structurally zero
Eigen::Index safe_pad(const EqtMatrix& a, Eigen::Index n) {
  Eigen::Index m = n + std::max(0, -a.symbol().lo()) + 2;
  m = std::max(m, a.correction().cols() + 2);
  m = std::max(m, (Eigen::Index)a.limit().size() + 2);
  return m;
}

double block_gap(const EqtMatrix& got, const Eigen::MatrixXd& want) {
  return (got.leading_block(want.rows(), want.cols()) - want).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_SUITE("eqt_algebra") {
  TEST_CASE("leading_block assembles symbol, correction and limit") {
    LaurentSymbol sym = LaurentSymbol::from_pairs({{-1, 2.0}, {0, 5.0}, {1, 3.0}});
    sdaqt::CorrectionBuilder cb;
    Eigen::MatrixXd e(1, 2);
    e << 10.0, 20.0;
    cb.add_dense(e);
    EqtMatrix a(sym, cb.finalize(1e-15), {100.0}, 1e-15);
    Eigen::MatrixXd blk = a.leading_block(3, 3);
    CHECK(blk(0, 0) == doctest::Approx(5.0 + 10.0 + 100.0));
    CHECK(blk(0, 1) == doctest::Approx(2.0 + 20.0));
    CHECK(blk(1, 0) == doctest::Approx(3.0 + 100.0));
    CHECK(blk(2, 2) == doctest::Approx(5.0));
    CHECK(blk(2, 0) == doctest::Approx(100.0));
  }

  TEST_CASE("sum and difference agree with the truncation oracle") {
    for (unsigned seed : {1u, 2u, 3u}) {
      EqtMatrix a = random_eqt(seed, seed % 2 == 0);
      EqtMatrix b = random_eqt(seed + 50, seed % 2 == 1);
      const Eigen::Index n = 60;
      Eigen::MatrixXd da = sdaqt::oracle::dense_truncation(a, n).mat();
      Eigen::MatrixXd db = sdaqt::oracle::dense_truncation(b, n).mat();
      CHECK(block_gap(a + b, da + db) <= 1e-14);
      CHECK(block_gap(a - b, da - db) <= 1e-14);
      CHECK(block_gap(a.scaled(-1.75), -1.75 * da) <= 1e-14);
    }
  }

  TEST_CASE("product agrees with the truncation oracle") {
    for (unsigned seed : {4u, 5u, 6u, 7u}) {
      EqtMatrix a = random_eqt(seed, seed % 2 == 0);
      EqtMatrix b = random_eqt(seed + 90, seed % 3 == 0);
      const Eigen::Index n = 50;
      const Eigen::Index m = std::max(safe_pad(a, n), safe_pad(b, n));
      Eigen::MatrixXd da = sdaqt::oracle::dense_truncation(a, m).mat();
      Eigen::MatrixXd db = sdaqt::oracle::dense_truncation(b, m).mat();
      Eigen::MatrixXd want = (da * db).topLeftCorner(n, n);
      double scale = std::max(1.0, a.norm_inf() * b.norm_inf());
      CHECK(block_gap(a * b, want) <= 1e-13 * scale);
    }
  }

  TEST_CASE("product handles wide supports through the transform path") {
    // long symbols push the Hankel cross terms over the dense cutoff
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> ca, cb;
    for (int k = -300; k <= 300; ++k) {
      ca.push_back((k == 0 ? 4.0 : dist(rng)) * std::pow(0.97, std::abs(k)));
      cb.push_back((k == 0 ? 3.0 : dist(rng)) * std::pow(0.96, std::abs(k)));
    }
    EqtMatrix a = EqtMatrix::from_symbol(LaurentSymbol(-300, ca));
    EqtMatrix b = EqtMatrix::from_symbol(LaurentSymbol(-300, cb));
    const Eigen::Index n = 40, m = 40 + 301 + 2;
    Eigen::MatrixXd want = (sdaqt::oracle::dense_truncation(a, m).mat() *
                            sdaqt::oracle::dense_truncation(b, m).mat())
                               .topLeftCorner(n, n);
    double scale = a.norm_inf() * b.norm_inf();
    CHECK(block_gap(a * b, want) <= 1e-13 * scale);
  }

  TEST_CASE("quasi-Toeplitz matrices are closed under the algebra") {
    EqtMatrix a = random_eqt(8, false);
    EqtMatrix b = random_eqt(9, false);
    CHECK(a.is_qt());
    CHECK((a + b).is_qt());
    CHECK((a - b).is_qt());
    CHECK((a * b).is_qt());
    CHECK(a.scaled(2.0).is_qt());
    CHECK(a.inverse().is_qt());
    CHECK(a.compressed().is_qt());
    // the limit part enters through products with an extended matrix
    EqtMatrix e = random_eqt(10, true);
    CHECK(!e.is_qt());
    CHECK(!(a + e).is_qt());
  }

  TEST_CASE("compression is idempotent down to the bits") {
    for (unsigned seed : {11u, 12u}) {
      EqtMatrix a = random_eqt(seed, true);
      EqtMatrix b = random_eqt(seed + 30, true);
      EqtMatrix p = (a * b) + a.scaled(0.5);
      EqtMatrix c1 = p.compressed();
      EqtMatrix c2 = c1.compressed();
      CHECK(c1.to_json() == c2.to_json());
    }
  }

  TEST_CASE("norm_inf brackets the truncated row sums") {
    for (unsigned seed : {13u, 14u, 15u}) {
      EqtMatrix a = random_eqt(seed, seed % 2 == 0);
      double n = a.norm_inf();
      Eigen::MatrixXd d = sdaqt::oracle::dense_truncation(a, 400).mat();
      double trunc = d.cwiseAbs().rowwise().sum().maxCoeff();
      CHECK(n >= trunc - 1e-12);
      // the asymptotic row carries the full symbol plus limit mass
      double vsum = 0;
      for (double v : a.limit()) vsum += std::abs(v);
      CHECK(n >= a.symbol().l1() + vsum - 1e-12);
      // and the truncation at this width already sees nearly all of it
      CHECK(n <= trunc + 1e-6);
    }
  }

  TEST_CASE("norm_inf is exact when a corrected row dominates") {
    LaurentSymbol sym = LaurentSymbol::from_pairs({{0, 1.0}, {1, 0.5}});
    sdaqt::CorrectionBuilder cb;
    Eigen::MatrixXd e(2, 2);
    e << 0.0, 0.0, 10.0, -10.0;
    cb.add_dense(e);
    EqtMatrix a(sym, cb.finalize(1e-15), {}, 1e-15);
    // row 1: |0.5 + 10| + |1 - 10| = 19.5 beats the asymptotic 1.5
    CHECK(a.norm_inf() == doctest::Approx(19.5));
  }

  TEST_CASE("ones_action matches truncated row sums on stabilized rows") {
    for (unsigned seed : {16u, 17u}) {
      EqtMatrix a = random_eqt(seed, seed % 2 == 1);
      auto oa = a.ones_action();
      const Eigen::Index m = 300;
      Eigen::VectorXd rs = sdaqt::oracle::dense_truncation(a, m).mat().rowwise().sum();
      // rows far from the bottom of the window have their full mass inside
      for (Eigen::Index i = 0; i < 80; ++i) {
        double want = oa.scalar + (i < (Eigen::Index)oa.tail.size() ? oa.tail[i] : 0.0);
        CHECK(std::abs(rs[i] - want) <= 1e-12);
      }
    }
  }

  TEST_CASE("apply agrees with the truncation for quasi-Toeplitz input") {
    EqtMatrix a = random_eqt(18, false);
    Eigen::VectorXd x(11);
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = dist(rng);
    Eigen::VectorXd y = a.apply(x);
    const Eigen::Index m = 200;
    Eigen::MatrixXd d = sdaqt::oracle::dense_truncation(a, m).mat();
    Eigen::VectorXd xp = Eigen::VectorXd::Zero(m);
    xp.head(x.size()) = x;
    Eigen::VectorXd want = d * xp;
    for (Eigen::Index i = 0; i < 100; ++i) {
      double got = i < y.size() ? y[i] : 0.0;
      CHECK(std::abs(got - want[i]) <= 1e-13);
    }
    CHECK_THROWS_AS((void)random_eqt(20, true).apply(x), std::logic_error);
  }

  TEST_CASE("apply_transpose folds the limit through the column sums") {
    EqtMatrix a = random_eqt(21, true);
    Eigen::VectorXd x(7);
    for (Eigen::Index i = 0; i < 7; ++i) x[i] = 0.5 - 0.1 * double(i);
    Eigen::VectorXd y = a.apply_transpose(x);
    const Eigen::Index m = 200;
    Eigen::MatrixXd d = sdaqt::oracle::dense_truncation(a, m).mat();
    Eigen::VectorXd xp = Eigen::VectorXd::Zero(m);
    xp.head(7) = x;
    Eigen::VectorXd want = d.transpose() * xp;
    for (Eigen::Index j = 0; j < 100; ++j) {
      double got = j < y.size() ? y[j] : 0.0;
      CHECK(std::abs(got - want[j]) <= 1e-13);
    }
  }

  TEST_CASE("minus_ones_outer moves mass into the limit part") {
    EqtMatrix a = random_eqt(22, false);
    std::vector<double> u = {0.25, -0.5, 0.125};
    EqtMatrix b = a.minus_ones_outer(u);
    CHECK(!b.is_qt());
    Eigen::MatrixXd da = sdaqt::oracle::dense_truncation(a, 30).mat();
    for (size_t j = 0; j < u.size(); ++j) da.col((Eigen::Index)j).array() -= u[j];
    CHECK(block_gap(b, da) <= 1e-14);
  }

  TEST_CASE("threshold must be positive and finite") {
    CHECK_THROWS_AS(EqtMatrix(LaurentSymbol::one(), sdaqt::CompactCorrection(), {}, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(EqtMatrix(LaurentSymbol::one(), sdaqt::CompactCorrection(), {}, -1e-15),
                    std::invalid_argument);
  }
}
