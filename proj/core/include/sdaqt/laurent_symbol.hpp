#pragma once

#include <complex>
#include <utility>
#include <vector>

namespace sdaqt {

// Finitely supported Laurent polynomial a(z) = sum_k c_k z^k.  Used as the
// symbol of a semi-infinite Toeplitz operator T(a) with entries
// T(a)(i,j) = c_{i-j}: positive offsets fill subdiagonals, negative offsets
// superdiagonals.  Zero coefficients at the ends of the window are trimmed on
// construction, so the window is tight and the zero symbol is canonical.
class LaurentSymbol {
 public:
  LaurentSymbol() = default;  // zero symbol
  LaurentSymbol(int lo, std::vector<double> coeffs);

  static LaurentSymbol one();
  static LaurentSymbol delta(int offset, double value);
  static LaurentSymbol from_pairs(
      std::initializer_list<std::pair<int, double>> terms);

  bool empty() const { return c_.empty(); }
  int lo() const { return lo_; }              // meaningful only if !empty()
  int hi() const { return lo_ + static_cast<int>(c_.size()) - 1; }
  int length() const { return static_cast<int>(c_.size()); }
  double coeff(int k) const;
  const std::vector<double>& coeffs() const { return c_; }

  double sum() const;     // a(1)
  double l1() const;      // sum_k |c_k|
  double max_abs() const;

  LaurentSymbol operator+(const LaurentSymbol& o) const;
  LaurentSymbol operator-(const LaurentSymbol& o) const;
  LaurentSymbol operator*(const LaurentSymbol& o) const;  // convolution
  LaurentSymbol scaled(double s) const;

  std::complex<double> eval(std::complex<double> z) const;
  // Values a(w^j) at the n-th roots of unity w = exp(2*pi*i/n), j = 0..n-1.
  std::vector<std::complex<double>> eval_on_grid(int n) const;
  // Inverse of eval_on_grid: coefficients with offsets in (-n/2, n/2] from
  // grid values (coefficients of larger offset alias; callers control n).
  static LaurentSymbol from_grid(const std::vector<std::complex<double>>& v,
                                 double drop_below = 0.0);

  // Zeroes every |c_k| < eps (interior included) and trims the window.
  LaurentSymbol compressed(double eps) const;

  // Tail of T(a)*1 = a(1)*1 + tail: tail_i = -sum_{k >= i+1} c_k for
  // i = 0..hi()-1 (empty when hi() <= 0).
  std::vector<double> ones_tail() const;

  // Symbol of T(a)^T, i.e. offsets negated.
  LaurentSymbol reversed() const;

 private:
  void trim();
  int lo_ = 0;
  std::vector<double> c_;
};

// y = T(a) x for the semi-infinite operator: y_i = sum_j c_{i-j} x_j with
// i >= 0 and x supported on [0, x.size()).  The result has every structurally
// nonzero entry (length at most hi(a) + x.size()).
std::vector<double> toeplitz_apply(const LaurentSymbol& a,
                                   const std::vector<double>& x);

}  // namespace sdaqt
