#include <doctest.h>

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <vector>

#include "sdaqt/dense_matrix.hpp"
#include "sdaqt/oracle.hpp"
#include "sdaqt/sda.hpp"
#include "support/rational.hpp"

using sdaqt::DenseMatrix;
using testsupport::Rat;

namespace {

// Scalar probe equation x^2 - 3x + 2 = 0 written as quadratic coefficients
// (2, -3, 1): roots 1 and 2, so the minimal root is exactly 1 and the dual
// equation 2v^2 - 3v + 1 = 0 has minimal root 1/2.  Every doubling iterate is
// a small fraction, which pins the implementation to hand-checkable values.
const DenseMatrix kAm1 = DenseMatrix::FromRows({{2.0}});
const DenseMatrix kA0 = DenseMatrix::FromRows({{-3.0}});
const DenseMatrix kA1 = DenseMatrix::FromRows({{1.0}});

struct RatPencil {
  Rat e, f, p, q;
};

// the doubling update in exact fractions, mirroring sda_step on scalars
RatPencil rat_step(const RatPencil& s) {
  Rat one(1);
  Rat iqp = one / (one - s.q * s.p);
  Rat ipq = one / (one - s.p * s.q);
  return {s.e * iqp * s.e, s.f * ipq * s.f, s.p + s.f * ipq * s.p * s.e,
          s.q + s.e * iqp * s.q * s.f};
}

double scalar(const DenseMatrix& m) { return m(0, 0); }

}  // namespace

TEST_SUITE("sda_dense") {
  TEST_CASE("standard initialization freezes to the exact fractions") {
    auto s = sdaqt::init_standard(kAm1, kA0, kA1);
    CHECK(scalar(s.e) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(scalar(s.p) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(scalar(s.f) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(scalar(s.q) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }

  TEST_CASE("one doubling step lands on the hand-checked fractions") {
    // exact route: the update rule applied in rational arithmetic
    RatPencil rs{Rat(2, 3), Rat(1, 3), Rat(2, 3), Rat(1, 3)};
    RatPencil r1 = rat_step(rs);
    CHECK(r1.e == Rat(4, 7));
    CHECK(r1.f == Rat(1, 7));
    CHECK(r1.p == Rat(6, 7));
    CHECK(r1.q == Rat(3, 7));

    // floating route: the production step lands on the same numbers
    auto s = sdaqt::sda_step(sdaqt::init_standard(kAm1, kA0, kA1));
    CHECK(scalar(s.e) == doctest::Approx(4.0 / 7.0).epsilon(1e-14));
    CHECK(scalar(s.f) == doctest::Approx(1.0 / 7.0).epsilon(1e-14));
    CHECK(scalar(s.p) == doctest::Approx(6.0 / 7.0).epsilon(1e-14));
    CHECK(scalar(s.q) == doctest::Approx(3.0 / 7.0).epsilon(1e-14));
  }

  TEST_CASE("error sequence squares: denominators 2^(2^k + 1) - 1") {
    // invariant: the error 1 - P_k equals F_k exactly, and Q_k walks to 1/2
    RatPencil s{Rat(2, 3), Rat(1, 3), Rat(2, 3), Rat(1, 3)};
    const std::array<Rat, 5> want = {Rat(1, 3), Rat(1, 7), Rat(1, 31), Rat(1, 511),
                                     Rat(1, 131071)};
    for (size_t k = 0; k < want.size(); ++k) {
      CHECK(Rat(1) - s.p == want[k]);
      CHECK(s.f == want[k]);
      if (k + 1 < want.size()) s = rat_step(s);
    }
    CHECK(s.q == Rat(65535, 131071));  // converging to the dual root 1/2

    // the double-precision run shadows the same history through its residual
    sdaqt::StopRule stop;
    stop.tol = 1e-12;
    sdaqt::InitScheme<DenseMatrix> scheme = sdaqt::StandardScheme<DenseMatrix>{};
    auto rep = sdaqt::run_sda(kAm1, kA0, kA1, scheme, stop);
    CHECK(rep.termination == sdaqt::Termination::kConverged);
    CHECK(rep.iterations == 4);
    REQUIRE(rep.residual_history.size() == 5);
    // residual at P_k is err * (1 + err) for this equation
    for (size_t k = 0; k < 5; ++k) {
      double err = want[k].value();
      CHECK(rep.residual_history[k] == doctest::Approx(err * (1.0 + err)).epsilon(1e-10));
    }
    CHECK(scalar(rep.solution) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(scalar(rep.dual) == doctest::Approx(0.5).epsilon(1e-4));
  }

  TEST_CASE("defect-corrected initialization freezes on the shifted scalar") {
    DenseMatrix gt = DenseMatrix::FromRows({{0.9}});
    // residual of the guess: R(0.9) = 0.81 - 2.7 + 2 = 0.11
    CHECK(sdaqt::residual_norm(kAm1, kA0, kA1, gt) == doctest::Approx(0.11).epsilon(1e-14));
    auto s = sdaqt::init_defect_corrected(kAm1, kA0, kA1, gt);
    CHECK(scalar(s.e) == doctest::Approx(20.0 / 21.0).epsilon(1e-13));
    CHECK(scalar(s.f) == doctest::Approx(10.0 / 21.0).epsilon(1e-13));
    CHECK(scalar(s.p) == doctest::Approx(11.0 / 210.0).epsilon(1e-13));
    // the bottom-right block of the reduced pencil carries +F0, not -F0
    CHECK(scalar(s.q) == doctest::Approx(10.0 / 21.0).epsilon(1e-13));
  }

  TEST_CASE("defect-corrected run converges to the increment and its dual") {
    DenseMatrix gt = DenseMatrix::FromRows({{0.9}});
    sdaqt::StopRule stop;
    stop.tol = 1e-13;
    sdaqt::InitScheme<DenseMatrix> scheme = sdaqt::DefectScheme<DenseMatrix>{gt};
    auto rep = sdaqt::run_sda(kAm1, kA0, kA1, scheme, stop);
    CHECK(rep.termination == sdaqt::Termination::kConverged);
    CHECK(rep.iterations <= 6);
    CHECK(scalar(rep.solution) == doctest::Approx(1.0).epsilon(1e-13));
    // dual iterate converges to V (1 - Gt V)^{-1} = (1/2) / (1 - 0.45)
    CHECK(scalar(rep.dual) == doctest::Approx(10.0 / 11.0).epsilon(1e-6));
  }

  TEST_CASE("pencil reduction reproduces the standard initialization") {
    for (unsigned seed : {61u, 62u, 63u}) {
      auto qbd = sdaqt::oracle::random_qbd(seed, 5);
      auto c = sdaqt::oracle::to_coefficients(qbd);
      auto direct = sdaqt::init_standard(c.am1, c.a0, c.a1);
      auto reduced = sdaqt::reduce_to_ssf1(sdaqt::companion_pencil(c.am1, c.a0, c.a1));
      CHECK((direct.e.mat() - reduced.e.mat()).cwiseAbs().maxCoeff() <= 1e-13);
      CHECK((direct.f.mat() - reduced.f.mat()).cwiseAbs().maxCoeff() <= 1e-13);
      CHECK((direct.p.mat() - reduced.p.mat()).cwiseAbs().maxCoeff() <= 1e-13);
      CHECK((direct.q.mat() - reduced.q.mat()).cwiseAbs().maxCoeff() <= 1e-13);
    }
  }

  TEST_CASE("solver matches the monotone oracle on random chains") {
    for (unsigned seed : {71u, 72u, 73u, 74u}) {
      auto qbd = sdaqt::oracle::random_qbd(seed, 6);
      auto c = sdaqt::oracle::to_coefficients(qbd);
      DenseMatrix want = sdaqt::oracle::minimal_solution_oracle(c.am1, c.a0, c.a1);
      sdaqt::InitScheme<DenseMatrix> scheme = sdaqt::StandardScheme<DenseMatrix>{};
      auto rep = sdaqt::run_sda(c.am1, c.a0, c.a1, scheme, sdaqt::kDoublingStop);
      CHECK(rep.termination == sdaqt::Termination::kConverged);
      CHECK((rep.solution.mat() - want.mat()).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }

  TEST_CASE("improved scheme keeps iterate row sums at zero") {
    auto qbd = sdaqt::oracle::random_qbd(99, 5);
    auto c = sdaqt::oracle::to_coefficients(qbd);
    // guess with unit row sums: all mass on the first phase
    Eigen::MatrixXd g0 = Eigen::MatrixXd::Zero(5, 5);
    g0.col(0).setOnes();
    DenseMatrix gt(g0);
    std::vector<double> u = {1.0, 0.0, 0.0, 0.0, 0.0};
    auto s = sdaqt::init_stochastic_improved(c.am1, c.a0, c.a1, gt, u);
    for (int k = 0; k < 5; ++k) {
      Eigen::VectorXd rs = s.p.mat().rowwise().sum();
      CHECK(rs.cwiseAbs().maxCoeff() <= 1e-12);
      s = sdaqt::sda_step(s);
    }
    // and the shifted candidate converges to the oracle
    sdaqt::InitScheme<DenseMatrix> scheme = sdaqt::ImprovedScheme<DenseMatrix>{gt, u};
    auto rep = sdaqt::run_sda(c.am1, c.a0, c.a1, scheme, sdaqt::kDoublingStop);
    DenseMatrix want = sdaqt::oracle::minimal_solution_oracle(c.am1, c.a0, c.a1);
    CHECK((rep.solution.mat() - want.mat()).cwiseAbs().maxCoeff() <= 1e-10);
  }

  TEST_CASE("improved scheme validates its inputs") {
    auto qbd = sdaqt::oracle::random_qbd(100, 3);
    auto c = sdaqt::oracle::to_coefficients(qbd);
    DenseMatrix gt(Eigen::MatrixXd::Identity(3, 3));
    CHECK_THROWS_AS(
        (void)sdaqt::init_stochastic_improved(c.am1, c.a0, c.a1, gt, {0.5, 0.2, 0.1}),
        std::invalid_argument);
    Eigen::MatrixXd half = 0.5 * Eigen::MatrixXd::Identity(3, 3);
    CHECK_THROWS_AS((void)sdaqt::init_stochastic_improved(c.am1, c.a0, c.a1,
                                                          DenseMatrix(half), {1.0, 0.0, 0.0}),
                    sdaqt::NotSubstochasticError);
  }

  TEST_CASE("max_iter budget reports without converging") {
    sdaqt::StopRule stop;
    stop.tol = 1e-30;  // unreachable
    stop.max_iter = 2;
    sdaqt::InitScheme<DenseMatrix> scheme = sdaqt::StandardScheme<DenseMatrix>{};
    auto rep = sdaqt::run_sda(kAm1, kA0, kA1, scheme, stop);
    // at most the budgeted number of steps, and a sane best iterate
    CHECK(rep.iterations <= 2);
    CHECK(rep.residual_history.size() == (size_t)rep.iterations + 1);
    CHECK(scalar(rep.solution) > 0.8);
    bool ended = rep.termination == sdaqt::Termination::kMaxIter ||
                 rep.termination == sdaqt::Termination::kStagnated;
    CHECK(ended);
  }

  TEST_CASE("fixed point iteration converges linearly to the same root") {
    sdaqt::StopRule stop;
    stop.tol = 1e-12;
    stop.max_iter = 100000;
    auto rep = sdaqt::run_fixed_point(kAm1, kA0, kA1, kAm1.zero_like(), stop);
    CHECK(rep.termination == sdaqt::Termination::kConverged);
    CHECK(scalar(rep.solution) == doctest::Approx(1.0).epsilon(1e-11));
    // linear convergence takes many more steps than doubling
    CHECK(rep.iterations > 10);
  }
}
