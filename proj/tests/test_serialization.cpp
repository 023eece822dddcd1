#include <doctest.h>

#include <Eigen/Dense>
#include <random>
#include <stdexcept>
#include <vector>

#include "sdaqt/eqt_matrix.hpp"
#include "sdaqt/laurent_symbol.hpp"

using sdaqt::EqtMatrix;
using sdaqt::LaurentSymbol;

namespace {

EqtMatrix sample(unsigned seed, bool factored, bool with_limit) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  LaurentSymbol sym = LaurentSymbol::from_pairs(
      {{-2, dist(rng)}, {0, 2.0 + dist(rng)}, {1, dist(rng)}, {5, 1e-13 * dist(rng)}});
  sdaqt::CorrectionBuilder cb;
  if (factored) {
    Eigen::MatrixXd u(120, 2), w(90, 2);
    for (Eigen::Index i = 0; i < u.rows(); ++i)
      for (Eigen::Index j = 0; j < 2; ++j) u(i, j) = dist(rng);
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < 2; ++j) w(i, j) = dist(rng);
    cb.add_factors(u, w);
  } else {
    Eigen::MatrixXd d(3, 4);
    for (Eigen::Index i = 0; i < 3; ++i)
      for (Eigen::Index j = 0; j < 4; ++j) d(i, j) = dist(rng);
    cb.add_dense(d);
  }
  std::vector<double> lim;
  if (with_limit) lim = {dist(rng), dist(rng), 0.0, dist(rng)};
  return EqtMatrix(sym, cb.finalize(1e-15), lim, 1e-15);
}

}  // namespace

TEST_SUITE("serialization") {
  TEST_CASE("round trip is bit exact for every storage kind") {
    for (unsigned seed : {41u, 42u}) {
      for (bool factored : {false, true}) {
        for (bool with_limit : {false, true}) {
          EqtMatrix a = sample(seed, factored, with_limit);
          std::string text = a.to_json();
          EqtMatrix back = EqtMatrix::from_json(text);
          CHECK(back.to_json() == text);
          CHECK(back.threshold() == a.threshold());
          CHECK(back.is_qt() == a.is_qt());
          CHECK(back.symbol().lo() == a.symbol().lo());
          CHECK(back.correction().factored() == a.correction().factored());
          Eigen::MatrixXd d1 = a.leading_block(10, 10);
          Eigen::MatrixXd d2 = back.leading_block(10, 10);
          CHECK((d1 - d2).cwiseAbs().maxCoeff() == 0.0);
        }
      }
    }
  }

  TEST_CASE("empty matrix serializes") {
    EqtMatrix z = EqtMatrix::zero();
    EqtMatrix back = EqtMatrix::from_json(z.to_json());
    CHECK(back.symbol().empty());
    CHECK(back.correction().empty());
    CHECK(back.is_qt());
  }

  TEST_CASE("malformed input is rejected") {
    CHECK_THROWS_AS((void)EqtMatrix::from_json("not json"), std::invalid_argument);
    CHECK_THROWS_AS((void)EqtMatrix::from_json("{}"), std::invalid_argument);
    CHECK_THROWS_AS((void)EqtMatrix::from_json(R"({"threshold": 1e-15})"),
                    std::invalid_argument);
    // wrong value count inside a correction block
    EqtMatrix a = sample(43, false, false);
    std::string text = a.to_json();
    auto pos = text.find("\"values\"");
    REQUIRE(pos != std::string::npos);
    // drop one entry from the array to corrupt the shape
    auto br = text.find(']', pos);
    auto comma = text.rfind(',', br);
    REQUIRE(comma != std::string::npos);
    std::string corrupted = text.substr(0, comma) + text.substr(br);
    CHECK_THROWS_AS((void)EqtMatrix::from_json(corrupted), std::invalid_argument);
  }
}
