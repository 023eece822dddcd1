#pragma once

#include <chrono>
#include <cmath>
#include <concepts>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "sdaqt/errors.hpp"
#include "sdaqt/ones_action.hpp"

namespace sdaqt {

// Closed arithmetic needed by the doubling iteration.  Dense matrices and
// extended quasi-Toeplitz matrices both model it, so the solver is written
// once against this surface.
template <typename T>
concept MatrixAlgebra = requires(const T& a, const T& b, double s,
                                 const std::vector<double>& u) {
  { a + b } -> std::same_as<T>;
  { a - b } -> std::same_as<T>;
  { a* b } -> std::same_as<T>;
  { a.scaled(s) } -> std::same_as<T>;
  { a.inverse() } -> std::same_as<T>;
  { a.norm_inf() } -> std::same_as<double>;
  { a.ones_action() } -> std::same_as<OnesAction>;
  { a.compressed() } -> std::same_as<T>;
  { a.identity_like() } -> std::same_as<T>;
  { a.zero_like() } -> std::same_as<T>;
  { a.minus_ones_outer(u) } -> std::same_as<T>;
};

// first structured form pencil blocks: M = [[E, 0], [-P, I]], N = [[I, -Q], [0, F]]
template <MatrixAlgebra T>
struct Ssf1Pencil {
  T e, f, p, q;
};

enum class Termination { kConverged, kStagnated, kBreakdown, kMaxIter };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::kConverged: return "converged";
    case Termination::kStagnated: return "stagnated";
    case Termination::kBreakdown: return "breakdown";
    case Termination::kMaxIter: return "max-iterations";
  }
  return "unknown";
}

struct StopRule {
  double tol = 1e-14;
  int max_iter = 64;
};

inline constexpr StopRule kDoublingStop{1e-14, 64};
inline constexpr StopRule kFixedPointStop{1e-14, 100000};

template <MatrixAlgebra T>
struct SolveReport {
  T solution;                           // best candidate for the minimal root
  T dual;                               // companion iterate for the dual root
  double residual = 0;                  // residual of the reported solution
  int iterations = 0;                   // steps actually taken
  std::vector<double> residual_history; // residual per iterate, index 0 = start
  Termination termination = Termination::kMaxIter;
  double wall_seconds = 0;
  std::string diagnostic;               // set on breakdown
};

// residual of the quadratic equation at x
template <MatrixAlgebra T>
double residual_norm(const T& am1, const T& a0, const T& a1, const T& x) {
  return (((a1 * x + a0) * x) + am1).norm_inf();
}

// plain initialization from the coefficients
template <MatrixAlgebra T>
Ssf1Pencil<T> init_standard(const T& am1, const T& a0, const T& a1) {
  T a0inv = a0.inverse();
  T e = (a0inv * am1).scaled(-1.0);
  T f = (a0inv * a1).scaled(-1.0);
  return {e, f, e, f};
}

// initialization that iterates on the defect against an approximation gt of
// the solution; with gt = 0 it reduces to the standard one
template <MatrixAlgebra T>
Ssf1Pencil<T> init_defect_corrected(const T& am1, const T& a0, const T& a1,
                                    const T& gt) {
  T s = (a0 + a1 * gt).inverse();
  T r = a1 * (gt * gt) + a0 * gt + am1;  // defect of gt
  T p = (s * r).scaled(-1.0);
  T e = gt + p;
  T f = (s * a1).scaled(-1.0);
  return {e, f, p, f};
}

// stochastic-case variant: gt must have unit row sums and u is a probability
// vector; subtracting the rank-one limit keeps every iterate quasi-Toeplitz
template <MatrixAlgebra T>
Ssf1Pencil<T> init_stochastic_improved(const T& am1, const T& a0, const T& a1,
                                       const T& gt, const std::vector<double>& u) {
  double usum = 0;
  for (double x : u) usum += x;
  if (std::abs(usum - 1.0) > 1e-12)
    throw std::invalid_argument("u must sum to one");
  if (gt.ones_action().deviation_from(1.0) > 1e-10)
    throw NotSubstochasticError("gt must have unit row sums");
  T s = gt.minus_ones_outer(u);
  T k = (a0 + a1 * gt).inverse();
  T r = a1 * (gt * gt) + a0 * gt + am1;
  T kr = k * r;
  T p = kr.scaled(-1.0);
  T e = s - kr;
  T f = (k * a1).scaled(-1.0);
  return {e, f, p, f};
}

// one doubling step; squares the convergence order of the whole pencil
template <MatrixAlgebra T>
Ssf1Pencil<T> sda_step(const Ssf1Pencil<T>& s) {
  T id = s.e.identity_like();
  T iqp = (id - s.q * s.p).inverse();
  T ipq = (id - s.p * s.q).inverse();
  T te = s.e * iqp;  // E (I - QP)^{-1}
  T tf = s.f * ipq;  // F (I - PQ)^{-1}
  T e = te * s.e;
  T f = tf * s.f;
  T p = s.p + tf * (s.p * s.e);
  T q = s.q + te * (s.q * s.f);
  return {e, f, p, q};
}

template <MatrixAlgebra T>
struct StandardScheme {};
template <MatrixAlgebra T>
struct DefectScheme {
  T g_tilde;
};
template <MatrixAlgebra T>
struct ImprovedScheme {
  T g_tilde;
  std::vector<double> u;
};
template <MatrixAlgebra T>
using InitScheme = std::variant<StandardScheme<T>, DefectScheme<T>, ImprovedScheme<T>>;

namespace detail {

class WallTimer {
 public:
  WallTimer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

// Doubling iteration.  Halts when the residual drops below tol, increases,
// or keeps shrinking while the contraction factor worsens step after step:
// each doubling step squares the error, so three consecutive steps of
// worsening contraction mean the iteration is grinding toward a floor it
// will not pass (iterates outside the representable class behave exactly
// like this, decaying ever slower while their support doubles).  On a halt
// before tol the best iterate seen is reported.  Breakdowns inside a step
// terminate with the best iterate so far and the failure message.
template <MatrixAlgebra T>
SolveReport<T> run_sda(const T& am1, const T& a0, const T& a1,
                       const InitScheme<T>& scheme, const StopRule& stop) {
  detail::WallTimer timer;
  SolveReport<T> rep{am1.zero_like(), am1.zero_like()};
  const bool shifted = !std::holds_alternative<StandardScheme<T>>(scheme);
  int k = 0;
  try {
    Ssf1Pencil<T> s = std::visit(
        [&](const auto& sch) -> Ssf1Pencil<T> {
          using S = std::decay_t<decltype(sch)>;
          if constexpr (std::is_same_v<S, StandardScheme<T>>)
            return init_standard(am1, a0, a1);
          else if constexpr (std::is_same_v<S, DefectScheme<T>>)
            return init_defect_corrected(am1, a0, a1, sch.g_tilde);
          else
            return init_stochastic_improved(am1, a0, a1, sch.g_tilde, sch.u);
        },
        scheme);
    const T* gshift = nullptr;
    if (const auto* d = std::get_if<DefectScheme<T>>(&scheme)) gshift = &d->g_tilde;
    if (const auto* m = std::get_if<ImprovedScheme<T>>(&scheme)) gshift = &m->g_tilde;

    T cand = shifted ? (*gshift + s.p) : s.p;
    double r = residual_norm(am1, a0, a1, cand);
    rep.residual_history.push_back(r);
    rep.solution = cand;
    rep.dual = s.q;
    rep.residual = r;

    double prev_ratio = 0;  // last step's contraction factor
    int decel = 0;          // consecutive steps with worsening contraction

    while (true) {
      if (r < stop.tol) {
        rep.termination = Termination::kConverged;
        break;
      }
      if ((k > 0 && r > rep.residual_history[k - 1]) || decel >= 3) {
        rep.termination = Termination::kStagnated;
        break;
      }
      if (k >= stop.max_iter) {
        rep.termination = Termination::kMaxIter;
        break;
      }
      s = sda_step(s);
      ++k;
      cand = shifted ? (*gshift + s.p) : s.p;
      r = residual_norm(am1, a0, a1, cand);
      const double prev = rep.residual_history.back();
      const double ratio = prev > 0 ? r / prev : 0.0;
      decel = (k >= 2 && ratio > prev_ratio) ? decel + 1 : 0;
      prev_ratio = ratio;
      rep.residual_history.push_back(r);
      if (r < rep.residual) {
        rep.solution = cand;
        rep.dual = s.q;
        rep.residual = r;
      }
    }
  } catch (const BreakdownError& e) {
    rep.termination = Termination::kBreakdown;
    rep.diagnostic = e.what();
  }
  rep.iterations = k;
  rep.wall_seconds = timer.seconds();
  return rep;
}

// natural fixed-point iteration x <- -a0^{-1} (am1 + a1 x^2) from x0,
// with the same stopping rule; linear convergence at the rate sigma * tau
template <MatrixAlgebra T>
SolveReport<T> run_fixed_point(const T& am1, const T& a0, const T& a1,
                               const T& x0, const StopRule& stop) {
  detail::WallTimer timer;
  SolveReport<T> rep{am1.zero_like(), am1.zero_like()};
  int k = 0;
  try {
    T a0inv = a0.inverse();
    T x = x0;
    T y = am1 + a1 * (x * x);  // shared between residual and update
    double r = (y + a0 * x).norm_inf();
    rep.residual_history.push_back(r);
    rep.solution = x;
    rep.residual = r;

    while (true) {
      if (r < stop.tol) {
        rep.termination = Termination::kConverged;
        break;
      }
      if (k > 0 && r > rep.residual_history[k - 1]) {
        rep.termination = Termination::kStagnated;
        break;
      }
      if (k >= stop.max_iter) {
        rep.termination = Termination::kMaxIter;
        break;
      }
      x = (a0inv * y).scaled(-1.0);
      ++k;
      y = am1 + a1 * (x * x);
      r = (y + a0 * x).norm_inf();
      rep.residual_history.push_back(r);
      if (r < rep.residual) {
        rep.solution = x;
        rep.residual = r;
      }
    }
  } catch (const BreakdownError& e) {
    rep.termination = Termination::kBreakdown;
    rep.diagnostic = e.what();
  }
  rep.iterations = k;
  rep.wall_seconds = timer.seconds();
  return rep;
}

}  // namespace sdaqt
