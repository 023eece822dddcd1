#include <doctest.h>

#include <Eigen/Dense>
#include <random>
#include <stdexcept>

#include "sdaqt/dense_matrix.hpp"

using sdaqt::DenseMatrix;

TEST_SUITE("dense") {
  TEST_CASE("arithmetic matches Eigen") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::MatrixXd a(3, 3), b(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        a(i, j) = dist(rng);
        b(i, j) = dist(rng);
      }
    DenseMatrix da(a), db(b);
    CHECK(((da + db).mat() - (a + b)).norm() == 0.0);
    CHECK(((da - db).mat() - (a - b)).norm() == 0.0);
    CHECK(((da * db).mat() - (a * b)).norm() <= 1e-15);
    CHECK((da.scaled(-2.5).mat() + 2.5 * a).norm() == 0.0);
  }

  TEST_CASE("inverse of an exact fraction") {
    DenseMatrix a = DenseMatrix::FromRows({{7.0 / 9.0}});
    CHECK(a.inverse()(0, 0) == doctest::Approx(9.0 / 7.0).epsilon(1e-15));
    DenseMatrix s = DenseMatrix::FromRows({{0.0}});
    CHECK_THROWS_AS((void)s.inverse(), std::exception);
  }

  TEST_CASE("norm_inf is the max absolute row sum") {
    DenseMatrix a = DenseMatrix::FromRows({{1.0, -2.0}, {0.25, 0.25}});
    CHECK(a.norm_inf() == doctest::Approx(3.0));
  }

  TEST_CASE("ones_action splits into scalar and deviation tail") {
    DenseMatrix a = DenseMatrix::FromRows({{0.5, 0.5}, {0.25, 0.5}});
    auto oa = a.ones_action();
    // rows sums are 1 and 0.75; the representation must reproduce them
    REQUIRE(oa.tail.size() >= 2);
    CHECK(oa.scalar + oa.tail[0] == doctest::Approx(1.0));
    CHECK(oa.scalar + oa.tail[1] == doctest::Approx(0.75));
  }

  TEST_CASE("minus_ones_outer subtracts a rank one block") {
    DenseMatrix a = DenseMatrix::FromRows({{1.0, 2.0}, {3.0, 4.0}});
    DenseMatrix b = a.minus_ones_outer({10.0});
    CHECK(b(0, 0) == doctest::Approx(-9.0));
    CHECK(b(1, 0) == doctest::Approx(-7.0));
    CHECK(b(0, 1) == doctest::Approx(2.0));
    // u longer than the order is truncated
    DenseMatrix c = a.minus_ones_outer({1.0, 1.0, 99.0});
    CHECK(c(0, 1) == doctest::Approx(1.0));
  }

  TEST_CASE("order mismatch throws") {
    DenseMatrix a = DenseMatrix::Identity(2), b = DenseMatrix::Identity(3);
    CHECK_THROWS_AS((void)(a + b), std::invalid_argument);
    CHECK_THROWS_AS((void)(a * b), std::invalid_argument);
  }
}
