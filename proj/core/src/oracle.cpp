#include "sdaqt/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "sdaqt/errors.hpp"

namespace sdaqt::oracle {
namespace {

double residual_inf(const Eigen::MatrixXd& am1, const Eigen::MatrixXd& a0,
                    const Eigen::MatrixXd& a1, const Eigen::MatrixXd& x) {
  return ((a1 * x + a0) * x + am1).cwiseAbs().rowwise().sum().maxCoeff();
}

std::vector<std::complex<double>> sorted_spectrum(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  std::vector<std::complex<double>> ev(es.eigenvalues().data(),
                                       es.eigenvalues().data() + m.rows());
  std::sort(ev.begin(), ev.end(), [](auto a, auto b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return ev;
}

}  // namespace

DenseMatrix dense_truncation(const EqtMatrix& a, Eigen::Index n) {
  return DenseMatrix(a.leading_block(n, n));
}

DenseMatrix minimal_solution_oracle(const DenseMatrix& am1, const DenseMatrix& a0,
                                    const DenseMatrix& a1, double tol,
                                    long max_iter) {
  const Eigen::Index n = am1.order();
  if (a0.order() != n || a1.order() != n)
    throw std::invalid_argument("order mismatch between coefficients");
  // rewrite as x <- (I - b0)^{-1} (bm1 + b1 x^2), all pieces nonnegative
  Eigen::MatrixXd bm1 = -am1.mat();
  Eigen::MatrixXd b1 = -a1.mat();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a0.mat());
  if (lu.rcond() < 100.0 * std::numeric_limits<double>::epsilon())
    throw OracleError("middle coefficient is numerically singular");
  if ((bm1.array() < -1e-14).any() || (b1.array() < -1e-14).any())
    throw OracleError("outer coefficients must be nonpositive for the monotone oracle");

  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
  const Eigen::MatrixXd& a0m = a0.mat();
  const Eigen::MatrixXd& a1m = a1.mat();
  const Eigen::MatrixXd& am1m = am1.mat();
  for (long k = 0; k < max_iter; ++k) {
    if (residual_inf(am1m, a0m, a1m, x) <= tol) return DenseMatrix(x);
    Eigen::MatrixXd next = lu.solve(-(am1m + a1m * x * x));
    if (((next - x).array() < -1e-12).any())
      throw OracleError("monotone iteration decreased; equation is outside the "
                        "oracle's scope");
    if ((next.array() < -1e-12).any())
      throw OracleError("monotone iteration left the nonnegative cone");
    x = std::move(next);
  }
  throw OracleError("monotone iteration did not reach the tolerance within the "
                    "step budget");
}

DensePencil transformed_pencil(const DenseMatrix& am1, const DenseMatrix& a0,
                               const DenseMatrix& a1, const DenseMatrix& gt) {
  DensePencil p = companion_pencil(am1, a0, a1);
  const Eigen::Index n = am1.order();
  Eigen::MatrixXd l = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  l.bottomLeftCorner(n, n) = -a1.mat() * gt.mat();
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  r.bottomLeftCorner(n, n) = gt.mat();
  p.m = l * p.m * r;
  p.n = l * p.n * r;
  return p;
}

double pencil_equivalence_gap(const DenseMatrix& am1, const DenseMatrix& a0,
                              const DenseMatrix& a1, const DenseMatrix& gt) {
  Ssf1Pencil<DenseMatrix> via_pencil =
      reduce_to_ssf1(transformed_pencil(am1, a0, a1, gt));
  // closed form, spelled out here independently of the solver templates
  const Eigen::Index n = am1.order();
  Eigen::MatrixXd s = a0.mat() + a1.mat() * gt.mat();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(s);
  Eigen::MatrixXd r =
      a1.mat() * gt.mat() * gt.mat() + a0.mat() * gt.mat() + am1.mat();
  Eigen::MatrixXd p0 = -lu.solve(r);
  Eigen::MatrixXd f0 = -lu.solve(a1.mat());
  Eigen::MatrixXd e0 = gt.mat() + p0;

  auto gap = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a - b).cwiseAbs().maxCoeff();
  };
  double g = gap(via_pencil.e.mat(), e0);
  g = std::max(g, gap(via_pencil.f.mat(), f0));
  g = std::max(g, gap(via_pencil.p.mat(), p0));
  g = std::max(g, gap(via_pencil.q.mat(), f0));
  (void)n;
  return g;
}

DualPair dual_subspace(const DenseMatrix& v, const DenseMatrix& gt) {
  const Eigen::Index n = v.order();
  Eigen::MatrixXd shift = Eigen::MatrixXd::Identity(n, n) - gt.mat() * v.mat();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(shift);
  if (lu.rcond() < 100.0 * std::numeric_limits<double>::epsilon())
    throw OracleError("I - gt v is numerically singular");
  Eigen::MatrixXd inv = lu.inverse();
  Eigen::MatrixXd y = v.mat() * inv;
  Eigen::MatrixXd z = shift * v.mat() * inv;
  return {DenseMatrix(y), DenseMatrix(z)};
}

double dual_subspace_residual(const DenseMatrix& am1, const DenseMatrix& a0,
                              const DenseMatrix& a1, const DenseMatrix& gt,
                              const DenseMatrix& v) {
  DensePencil p = transformed_pencil(am1, a0, a1, gt);
  DualPair d = dual_subspace(v, gt);
  const Eigen::Index n = am1.order();
  Eigen::MatrixXd stack(2 * n, n);
  stack.topRows(n) = d.y.mat();
  stack.bottomRows(n) = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd lhs = p.m * stack * d.z.mat();
  Eigen::MatrixXd rhs = p.n * stack;
  return (lhs - rhs).cwiseAbs().rowwise().sum().maxCoeff();
}

double invariant_subspace_residual(const DensePencil& p, const DenseMatrix& x,
                                   const DenseMatrix& w) {
  const Eigen::Index n = x.order();
  Eigen::MatrixXd stack(2 * n, n);
  stack.topRows(n) = Eigen::MatrixXd::Identity(n, n);
  stack.bottomRows(n) = x.mat();
  Eigen::MatrixXd lhs = p.m * stack;
  Eigen::MatrixXd rhs = p.n * stack * w.mat();
  return (lhs - rhs).cwiseAbs().rowwise().sum().maxCoeff();
}

double brauer_spectrum_gap(const DenseMatrix& g, const Eigen::VectorXd& u) {
  const Eigen::Index n = g.order();
  if (u.size() != n) throw std::invalid_argument("shift vector size mismatch");
  Eigen::MatrixXd shifted =
      g.mat() - Eigen::VectorXd::Ones(n) * u.transpose();
  std::vector<std::complex<double>> base = sorted_spectrum(g.mat());
  std::vector<std::complex<double>> got = sorted_spectrum(shifted);

  // expected spectrum: the eigenvalue nearest one becomes zero
  size_t at = 0;
  double best = std::abs(base[0] - 1.0);
  for (size_t i = 1; i < base.size(); ++i) {
    double d = std::abs(base[i] - 1.0);
    if (d < best) {
      best = d;
      at = i;
    }
  }
  std::vector<std::complex<double>> expect = base;
  expect[at] = 0.0;
  std::sort(expect.begin(), expect.end(), [](auto a, auto b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  double gap = 0;
  for (size_t i = 0; i < expect.size(); ++i)
    gap = std::max(gap, std::abs(expect[i] - got[i]));
  return gap;
}

double spectral_radius(const DenseMatrix& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m.mat(), false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double second_modulus(const DenseMatrix& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m.mat(), false);
  std::vector<double> mods(m.order());
  for (Eigen::Index i = 0; i < m.order(); ++i) mods[i] = std::abs(es.eigenvalues()[i]);
  std::sort(mods.begin(), mods.end(), std::greater<>());
  return mods.size() > 1 ? mods[1] : 0.0;
}

DenseQbd random_qbd(std::uint64_t seed, Eigen::Index n) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Eigen::MatrixXd bm1(n, n), b0(n, n), b1(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      bm1(i, j) = 1.2 * uni(rng);  // bias the level-down block
      b0(i, j) = uni(rng);
      b1(i, j) = uni(rng);
    }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = bm1.row(i).sum() + b0.row(i).sum() + b1.row(i).sum();
    bm1.row(i) /= s;
    b0.row(i) /= s;
    b1.row(i) /= s;
  }
  return {DenseMatrix(bm1), DenseMatrix(b0), DenseMatrix(b1)};
}

DenseCoefficients to_coefficients(const DenseQbd& q) {
  const Eigen::Index n = q.b0.order();
  return {DenseMatrix(-q.bm1.mat()),
          DenseMatrix(Eigen::MatrixXd::Identity(n, n) - q.b0.mat()),
          DenseMatrix(-q.b1.mat())};
}

}  // namespace sdaqt::oracle
