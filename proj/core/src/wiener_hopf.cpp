#include "sdaqt/wiener_hopf.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "sdaqt/errors.hpp"
#include "sdaqt/fft.hpp"

namespace sdaqt {
namespace {

constexpr int kGridStart = 4096;
constexpr int kGridCap = 1 << 21;
constexpr double kVanishRel = 1e-12;
// largest admissible fold coefficient; true tails sit far below this once the
// grid resolves them, rounding noise stays a decade or two under it
constexpr double kFoldTol = 1e-14;

struct PhaseWalk {
  bool resolved = false;   // all phase steps stayed well inside (-pi, pi)
  double total = 0;        // accumulated argument along the circle
  std::vector<double> theta;  // unwrapped phase at each node
};

PhaseWalk walk_phase(const std::vector<std::complex<double>>& v) {
  PhaseWalk w;
  const size_t n = v.size();
  w.theta.resize(n);
  w.theta[0] = std::arg(v[0]);
  w.resolved = true;
  for (size_t j = 0; j + 1 < n; ++j) {
    double d = std::arg(v[j + 1] / v[j]);
    if (std::abs(d) > 0.5 * M_PI) w.resolved = false;
    w.theta[j + 1] = w.theta[j] + d;
  }
  double closing = std::arg(v[0] / v[n - 1]);
  if (std::abs(closing) > 0.5 * M_PI) w.resolved = false;
  w.total = w.theta[n - 1] + closing - w.theta[0];
  return w;
}

double min_abs(const std::vector<std::complex<double>>& v) {
  double m = std::abs(v[0]);
  for (const auto& z : v) m = std::min(m, std::abs(z));
  return m;
}

double max_abs(const std::vector<std::complex<double>>& v) {
  double m = 0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

// Interpolates grid values into a symbol supported on the given half line
// (offsets >= 0 if nonnegative, <= 0 otherwise) and reports the coefficient
// mass that leaked onto the wrong side, which measures aliasing.
LaurentSymbol half_line_symbol(const std::vector<std::complex<double>>& values,
                               bool nonnegative, double drop, double* leak) {
  std::vector<std::complex<double>> hat = fft::dft_forward(values);
  const int n = static_cast<int>(values.size());
  for (auto& c : hat) c /= static_cast<double>(n);
  // index j holds offset j for j <= n/2, offset j-n beyond
  *leak = 0;
  std::vector<double> keep;
  int lo = 0;
  if (nonnegative) {
    keep.resize(n / 2 + 1);
    for (int j = 0; j <= n / 2; ++j) keep[j] = hat[j].real();
    for (int j = n / 2 + 1; j < n; ++j) *leak += std::abs(hat[j]);
    lo = 0;
  } else {
    keep.resize(n / 2 + 1);
    for (int j = n / 2; j < n; ++j) keep[j - n / 2] = hat[j].real();
    keep[n / 2] = hat[0].real();
    for (int j = 1; j < n / 2; ++j) *leak += std::abs(hat[j]);
    lo = -(n / 2);
  }
  // kept coefficients must be real for real symbols; stray imaginary parts
  // signal aliasing just like mass on the wrong half line
  for (int j = 0; j < n; ++j) *leak += std::abs(hat[j].imag());
  for (auto& c : keep)
    if (std::abs(c) < drop) c = 0;
  return LaurentSymbol(lo, keep);
}

}  // namespace

int winding_number(const LaurentSymbol& a) {
  if (a.empty()) throw SpectralError("winding number of the zero symbol");
  for (int n = kGridStart; n <= kGridCap; n *= 2) {
    std::vector<std::complex<double>> v = a.eval_on_grid(n);
    if (min_abs(v) <= kVanishRel * max_abs(v))
      throw SpectralError("symbol vanishes on the unit circle");
    PhaseWalk w = walk_phase(v);
    if (!w.resolved) continue;
    double turns = w.total / (2.0 * M_PI);
    long rounded = std::lround(turns);
    if (std::abs(turns - rounded) > 0.25) continue;
    return static_cast<int>(rounded);
  }
  throw SpectralError("phase of the symbol could not be resolved on the circle");
}

WienerHopfFactors wiener_hopf_factorize(const LaurentSymbol& a, double drop) {
  if (a.empty()) throw SpectralError("cannot factorize the zero symbol");
  const double scale = std::max(1.0, a.l1());
  int support = a.hi() - a.lo() + 1;
  int n0 = kGridStart;
  while (n0 < 4 * support) n0 *= 2;

  std::string why = "grid cap reached";
  for (int n = n0; n <= kGridCap; n *= 2) {
    std::vector<std::complex<double>> v = a.eval_on_grid(n);
    if (min_abs(v) <= kVanishRel * max_abs(v))
      throw SpectralError("symbol vanishes on the unit circle");
    PhaseWalk w = walk_phase(v);
    if (!w.resolved) {
      why = "phase steps ambiguous";
      continue;
    }
    long turns = std::lround(w.total / (2.0 * M_PI));
    if (std::abs(w.total / (2.0 * M_PI) - turns) > 0.25) {
      why = "phase total far from an integer";
      continue;
    }
    if (turns != 0)
      throw NotInvertibleError("symbol has winding number " +
                               std::to_string(turns) +
                               "; no canonical factorization");

    // log a on the grid, with the phase already unwrapped
    std::vector<std::complex<double>> lg(n);
    for (int j = 0; j < n; ++j)
      lg[j] = std::complex<double>(std::log(std::abs(v[j])), w.theta[j]);
    std::vector<std::complex<double>> c = fft::dft_forward(lg);
    for (auto& z : c) z /= static_cast<double>(n);

    // Aliasing indicator: log coefficients near the fold must be negligible.
    // Judged on the largest one — a sum over the fold half grows with the
    // grid from rounding noise alone and would reject every large grid.
    double fold = 0;
    for (int j = n / 4; j <= 3 * n / 4; ++j) fold = std::max(fold, std::abs(c[j]));
    if (fold > kFoldTol) {
      why = "log coefficients still carry mass at the fold";
      continue;
    }

    // Split the log.  The imaginary part of c0 is 0 or +-pi for symbols that
    // are real on the positive axis; it goes wholly to the minus factor so
    // both factors come out real.  The real part is shared evenly.
    std::complex<double> c0 = c[0];
    std::vector<std::complex<double>> lp(n, 0.0), lm(n, 0.0);
    lp[0] = 0.5 * c0.real();
    lm[0] = std::complex<double>(0.5 * c0.real(), c0.imag());
    for (int j = 1; j <= n / 2; ++j) lp[j] = c[j];
    for (int j = n / 2 + 1; j < n; ++j) lm[j] = c[j];

    auto exp_grid = [n](const std::vector<std::complex<double>>& lg_half,
                        double sign) {
      std::vector<std::complex<double>> g = fft::dft_backward(lg_half);
      for (auto& z : g) z = std::exp(sign * z);
      return g;
    };

    double leak = 0, worst_leak = 0;
    WienerHopfFactors out;
    std::vector<std::complex<double>> gv;

    gv = exp_grid(lp, +1.0);
    out.plus = half_line_symbol(gv, true, drop, &leak);
    worst_leak = std::max(worst_leak, leak);
    gv = exp_grid(lp, -1.0);
    out.plus_inv = half_line_symbol(gv, true, drop, &leak);
    worst_leak = std::max(worst_leak, leak);
    gv = exp_grid(lm, +1.0);
    out.minus = half_line_symbol(gv, false, drop, &leak);
    worst_leak = std::max(worst_leak, leak);
    gv = exp_grid(lm, -1.0);
    out.minus_inv = half_line_symbol(gv, false, drop, &leak);
    worst_leak = std::max(worst_leak, leak);

    // noise floor of the leak estimate grows with the grid size
    if (worst_leak > scale * (1e-12 + 1e-17 * n)) {
      why = "factor coefficients leak across the half line";
      continue;
    }

    LaurentSymbol resynth = out.minus * out.plus;
    double err = (resynth - a).l1();
    if (err > 1e-12 * scale) {
      why = "resynthesis residual too large";
      continue;
    }
    LaurentSymbol unit = out.plus * out.plus_inv - LaurentSymbol::one();
    if (unit.l1() > 1e-12) {
      why = "reciprocal factor residual too large";
      continue;
    }

    out.grid = n;
    out.resynthesis = err;
    return out;
  }
  throw NoFactorizationError("spectral factorization did not converge: " + why);
}

}  // namespace sdaqt
