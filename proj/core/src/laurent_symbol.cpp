#include "sdaqt/laurent_symbol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sdaqt/fft.hpp"

namespace sdaqt {

LaurentSymbol::LaurentSymbol(int lo, std::vector<double> coeffs)
    : lo_(lo), c_(std::move(coeffs)) {
  for (double v : c_)
    if (!std::isfinite(v))
      throw std::invalid_argument("LaurentSymbol: coefficients must be finite");
  trim();
}

void LaurentSymbol::trim() {
  std::size_t b = 0;
  while (b < c_.size() && c_[b] == 0.0) ++b;
  std::size_t e = c_.size();
  while (e > b && c_[e - 1] == 0.0) --e;
  if (b == e) {
    c_.clear();
    lo_ = 0;
    return;
  }
  if (b > 0 || e < c_.size()) {
    c_ = std::vector<double>(c_.begin() + static_cast<long>(b),
                             c_.begin() + static_cast<long>(e));
    lo_ += static_cast<int>(b);
  }
}

LaurentSymbol LaurentSymbol::one() { return LaurentSymbol(0, {1.0}); }

LaurentSymbol LaurentSymbol::delta(int offset, double value) {
  return LaurentSymbol(offset, {value});
}

LaurentSymbol LaurentSymbol::from_pairs(
    std::initializer_list<std::pair<int, double>> terms) {
  if (terms.size() == 0) return LaurentSymbol();
  int lo = terms.begin()->first, hi = terms.begin()->first;
  for (const auto& [k, v] : terms) {
    lo = std::min(lo, k);
    hi = std::max(hi, k);
  }
  std::vector<double> c(static_cast<std::size_t>(hi - lo + 1), 0.0);
  for (const auto& [k, v] : terms) c[static_cast<std::size_t>(k - lo)] += v;
  return LaurentSymbol(lo, std::move(c));
}

double LaurentSymbol::coeff(int k) const {
  if (empty() || k < lo_ || k > hi()) return 0.0;
  return c_[static_cast<std::size_t>(k - lo_)];
}

double LaurentSymbol::sum() const {
  double s = 0.0;
  for (double v : c_) s += v;
  return s;
}

double LaurentSymbol::l1() const {
  double s = 0.0;
  for (double v : c_) s += std::abs(v);
  return s;
}

double LaurentSymbol::max_abs() const {
  double s = 0.0;
  for (double v : c_) s = std::max(s, std::abs(v));
  return s;
}

LaurentSymbol LaurentSymbol::operator+(const LaurentSymbol& o) const {
  if (empty()) return o;
  if (o.empty()) return *this;
  const int lo = std::min(lo_, o.lo_);
  const int hi_out = std::max(hi(), o.hi());
  std::vector<double> c(static_cast<std::size_t>(hi_out - lo + 1), 0.0);
  for (int k = lo_; k <= hi(); ++k)
    c[static_cast<std::size_t>(k - lo)] += coeff(k);
  for (int k = o.lo_; k <= o.hi(); ++k)
    c[static_cast<std::size_t>(k - lo)] += o.coeff(k);
  return LaurentSymbol(lo, std::move(c));
}

LaurentSymbol LaurentSymbol::operator-(const LaurentSymbol& o) const {
  return *this + o.scaled(-1.0);
}

LaurentSymbol LaurentSymbol::operator*(const LaurentSymbol& o) const {
  if (empty() || o.empty()) return LaurentSymbol();
  return LaurentSymbol(lo_ + o.lo_, fft::convolve(c_, o.c_));
}

LaurentSymbol LaurentSymbol::scaled(double s) const {
  std::vector<double> c = c_;
  for (double& v : c) v *= s;
  return LaurentSymbol(lo_, std::move(c));
}

std::complex<double> LaurentSymbol::eval(std::complex<double> z) const {
  if (empty()) return {0.0, 0.0};
  // Horner on the polynomial part, then the z^{lo} prefactor.
  std::complex<double> acc(0.0, 0.0);
  for (std::size_t i = c_.size(); i-- > 0;) acc = acc * z + c_[i];
  return acc * std::pow(z, lo_);
}

std::vector<std::complex<double>> LaurentSymbol::eval_on_grid(int n) const {
  std::vector<std::complex<double>> in(static_cast<std::size_t>(n),
                                       std::complex<double>(0.0, 0.0));
  for (int k = lo_; k <= hi() && !empty(); ++k) {
    int idx = ((k % n) + n) % n;
    in[static_cast<std::size_t>(idx)] += coeff(k);
  }
  return fft::dft_backward(std::move(in));
}

LaurentSymbol LaurentSymbol::from_grid(
    const std::vector<std::complex<double>>& v, double drop_below) {
  const int n = static_cast<int>(v.size());
  std::vector<std::complex<double>> c = fft::dft_forward(v);
  const int lo = -(n / 2) + 1;  // offsets in (-n/2, n/2]
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (int k = lo; k <= n / 2; ++k) {
    int idx = ((k % n) + n) % n;
    double re = c[static_cast<std::size_t>(idx)].real() / n;
    out[static_cast<std::size_t>(k - lo)] =
        (std::abs(re) < drop_below) ? 0.0 : re;
  }
  return LaurentSymbol(lo, std::move(out));
}

LaurentSymbol LaurentSymbol::compressed(double eps) const {
  if (empty()) return *this;
  std::vector<double> c = c_;
  for (double& v : c)
    if (std::abs(v) < eps) v = 0.0;
  return LaurentSymbol(lo_, std::move(c));
}

std::vector<double> LaurentSymbol::ones_tail() const {
  const int h = empty() ? 0 : hi();
  if (h <= 0) return {};
  std::vector<double> t(static_cast<std::size_t>(h), 0.0);
  // t_i = -sum_{k >= i+1} c_k via suffix sums.
  double suffix = 0.0;
  for (int k = h; k >= 1; --k) {
    suffix += coeff(k);
    if (k - 1 < h) t[static_cast<std::size_t>(k - 1)] = -suffix;
  }
  return t;
}

LaurentSymbol LaurentSymbol::reversed() const {
  if (empty()) return *this;
  std::vector<double> c(c_.rbegin(), c_.rend());
  return LaurentSymbol(-hi(), std::move(c));
}

std::vector<double> toeplitz_apply(const LaurentSymbol& a,
                                   const std::vector<double>& x) {
  if (a.empty() || x.empty()) return {};
  // Full convolution c_m = sum_j a_{lo+m-j} x_j, then keep row indices >= 0.
  std::vector<double> c = fft::convolve(a.coeffs(), x);
  const int lo = a.lo();
  const int out_len = a.hi() + static_cast<int>(x.size());  // rows [0, out_len)
  if (out_len <= 0) return {};
  std::vector<double> y(static_cast<std::size_t>(out_len), 0.0);
  for (int i = std::max(0, lo); i < out_len; ++i) {
    const int m = i - lo;
    if (m >= 0 && m < static_cast<int>(c.size()))
      y[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(m)];
  }
  return y;
}

}  // namespace sdaqt
