#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "sdaqt/compact_correction.hpp"
#include "sdaqt/laurent_symbol.hpp"
#include "sdaqt/ones_action.hpp"

namespace sdaqt {

// structure report: band extents of the symbol and limit-row support at
// machine precision, stored dimensions and rank (at the matrix threshold) of
// the correction block
struct StructureStats {
  long lb = 0, ub = 0;
  long rc = 0, cc = 0;
  long rk = 0;
  long lim = 0;
};

// Semi-infinite matrix T(a) + E + ones * v^T: banded Toeplitz part from a
// Laurent symbol, a compact correction, and a rank-one limit part constant
// down each column.  Rows and columns indexed from zero; symbol offset +1 is
// the first subdiagonal.  A matrix with empty limit part is quasi-Toeplitz
// and the algebra keeps it that way.
class EqtMatrix {
 public:
  static constexpr double kDefaultThreshold = 1e-15;

  EqtMatrix() : threshold_(kDefaultThreshold) {}
  EqtMatrix(LaurentSymbol symbol, CompactCorrection correction,
            std::vector<double> limit, double threshold);

  static EqtMatrix zero(double threshold = kDefaultThreshold);
  static EqtMatrix identity(double threshold = kDefaultThreshold);
  static EqtMatrix from_symbol(LaurentSymbol a, double threshold = kDefaultThreshold);

  const LaurentSymbol& symbol() const { return symbol_; }
  const CompactCorrection& correction() const { return correction_; }
  const std::vector<double>& limit() const { return limit_; }
  double threshold() const { return threshold_; }
  bool is_qt() const { return limit_.empty(); }

  EqtMatrix operator+(const EqtMatrix& b) const;
  EqtMatrix operator-(const EqtMatrix& b) const;
  EqtMatrix operator*(const EqtMatrix& b) const;
  EqtMatrix scaled(double s) const;
  EqtMatrix inverse() const;

  double norm_inf() const;
  OnesAction ones_action() const;
  EqtMatrix compressed() const;
  EqtMatrix identity_like() const { return identity(threshold_); }
  EqtMatrix zero_like() const { return zero(threshold_); }
  // subtracts the limit-part ones * u^T
  EqtMatrix minus_ones_outer(const std::vector<double>& u) const;

  // entries of the leading r x c block
  Eigen::MatrixXd leading_block(Eigen::Index r, Eigen::Index c) const;
  // y = A x for a finitely supported column x (rows that can be nonzero);
  // requires an empty limit part, whose action would not be finitely supported
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  // y^T = x^T A; the limit part contributes (sum x) * v^T
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& x) const;

  StructureStats structure_stats() const;

  std::string to_json() const;
  static EqtMatrix from_json(const std::string& text);

 private:
  friend EqtMatrix eqt_mul(const EqtMatrix& a, const EqtMatrix& b);
  LaurentSymbol symbol_;
  CompactCorrection correction_;
  std::vector<double> limit_;  // empty means qt
  double threshold_;
};

// exposed for the product and inverse implementations
EqtMatrix eqt_mul(const EqtMatrix& a, const EqtMatrix& b);
EqtMatrix eqt_inverse(const EqtMatrix& a);

}  // namespace sdaqt
