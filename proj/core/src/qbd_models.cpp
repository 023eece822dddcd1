#include "sdaqt/qbd_models.hpp"

#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "sdaqt/errors.hpp"
#include "sdaqt/fft.hpp"

namespace sdaqt {
namespace {

using nlohmann::json;
using cd = std::complex<double>;

constexpr double kRowSumTol = 1e-12;
constexpr double kDriftTol = 1e-14;
constexpr double kTieTol = 1e-8;
constexpr double kOffGridTol = 1e-12;
constexpr int kGridStart = 256;
constexpr int kGridCap = 1 << 20;
// largest admissible interpolated coefficient near the fold; the root values
// are at most one, so anything above this is unresolved tail, not noise
constexpr double kFoldTol = 1e-15;

// both roots of alpha g^2 + beta g + gamma = 0, smaller modulus first;
// degenerate leading coefficient gives one finite root
std::pair<cd, cd> quadratic_roots(cd alpha, cd beta, cd gamma) {
  const double scale = std::max({std::abs(alpha), std::abs(beta), std::abs(gamma)});
  if (std::abs(alpha) <= 1e-300 * scale || alpha == 0.0) {
    if (beta == 0.0) throw ModelError("degenerate phase equation on the unit circle");
    cd r = -gamma / beta;
    return {r, cd(std::numeric_limits<double>::infinity(), 0)};
  }
  cd d = std::sqrt(beta * beta - 4.0 * alpha * gamma);
  if (std::real(std::conj(beta) * d) < 0) d = -d;
  cd q = -0.5 * (beta + d);
  cd r1, r2;
  if (q == 0.0) {  // gamma vanished: roots are 0 and -beta/alpha
    r1 = cd(0, 0);
    r2 = -beta / alpha;
  } else {
    r1 = gamma / q;  // product of roots = gamma / alpha
    r2 = q / alpha;
  }
  if (std::abs(r1) > std::abs(r2)) std::swap(r1, r2);
  return {r1, r2};
}

// scalar cyclic reduction for a1 g^2 + a0 g + am1 = 0; converges to the
// minimal-modulus solution when the moduli split
bool scalar_cyclic_reduction(cd a1, cd a0, cd am1, cd* g) {
  cd c1 = a1, c0 = a0, cm = am1, chat = a0;
  const cd am1_orig = am1;
  for (int it = 0; it < 128; ++it) {
    if (std::abs(c1) + std::abs(cm) < 1e-30) break;
    if (std::abs(c0) < 1e-280) return false;
    cd d = 1.0 / c0;
    cd cross = c1 * d * cm;
    chat -= cross;
    c0 -= 2.0 * cross;
    c1 = -c1 * d * c1;
    cm = -cm * d * cm;
  }
  if (std::abs(c1) + std::abs(cm) > 1e-20) return false;
  if (std::abs(chat) < 1e-280) return false;
  *g = -am1_orig / chat;
  return true;
}

double parse_fraction(const json& v, const char* where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    std::istringstream in(s);
    long long p = 0, q = 1;
    char slash = 0;
    if (!(in >> p)) throw ModelError(std::string("bad entry in ") + where + ": '" + s + "'");
    if (in >> slash) {
      if (slash != '/' || !(in >> q) || q == 0)
        throw ModelError(std::string("bad fraction in ") + where + ": '" + s + "'");
    }
    std::string rest;
    if (in >> rest)
      throw ModelError(std::string("trailing text in ") + where + ": '" + s + "'");
    return static_cast<double>(p) / static_cast<double>(q);
  }
  throw ModelError(std::string("entry in ") + where + " must be a number or 'p/q'");
}

}  // namespace

void validate(const QuarterPlaneModel& m) {
  double si = 0, sb = 0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (!(m.inner[i][j] >= 0) || !std::isfinite(m.inner[i][j]))
        throw ModelError("interior step probabilities must be nonnegative");
      si += m.inner[i][j];
    }
    for (int j = 0; j < 2; ++j) {
      if (!(m.boundary_x[i][j] >= 0) || !std::isfinite(m.boundary_x[i][j]))
        throw ModelError("boundary step probabilities must be nonnegative");
      sb += m.boundary_x[i][j];
    }
  }
  if (std::abs(si - 1.0) > kRowSumTol)
    throw ModelError("interior step probabilities must sum to one");
  if (std::abs(sb - 1.0) > kRowSumTol)
    throw ModelError("boundary step probabilities must sum to one");
}

const char* to_string(SolutionClass c) {
  switch (c) {
    case SolutionClass::kQt: return "quasi-toeplitz";
    case SolutionClass::kEqt: return "extended-quasi-toeplitz";
    case SolutionClass::kNullRecurrentBoundary: return "null-recurrent-boundary";
  }
  return "unknown";
}

SolutionClass classify_drift(const QuarterPlaneModel& m) {
  double down = 0, up = 0;
  for (int j = 0; j < 3; ++j) {
    down += m.inner[0][j];
    up += m.inner[2][j];
  }
  if (std::abs(up - down) <= kDriftTol) return SolutionClass::kNullRecurrentBoundary;
  return up > down ? SolutionClass::kEqt : SolutionClass::kQt;
}

LaurentSymbol level_symbol(const QuarterPlaneModel& m, int di) {
  if (di < -1 || di > 1) throw std::invalid_argument("level step must be -1, 0 or 1");
  const auto& row = m.inner[di + 1];
  // phase up (dj = +1) feeds the superdiagonal, offset -1
  return LaurentSymbol::from_pairs({{-1, row[2]}, {0, row[1]}, {1, row[0]}});
}

EqtMatrix level_block(const QuarterPlaneModel& m, int di, double threshold) {
  LaurentSymbol b = level_symbol(m, di);
  const auto& row = m.inner[di + 1];
  const auto& bx = m.boundary_x[di + 1];
  Eigen::MatrixXd fix(1, 2);
  fix(0, 0) = bx[0] - row[1];  // toeplitz row zero carries a_{di,0}, a_{di,1}
  fix(0, 1) = bx[1] - row[2];
  CorrectionBuilder cb;
  cb.add_dense(fix);
  // model coefficients are exact; drop only numerically invisible entries
  return EqtMatrix(b.compressed(std::numeric_limits<double>::epsilon()),
                   cb.finalize(threshold), {}, threshold);
}

QbdCoefficients build_coefficients(const QuarterPlaneModel& m, double threshold) {
  validate(m);
  EqtMatrix bm1 = level_block(m, -1, threshold);
  EqtMatrix b0 = level_block(m, 0, threshold);
  EqtMatrix b1 = level_block(m, 1, threshold);
  EqtMatrix id = EqtMatrix::identity(threshold);
  return {bm1.scaled(-1.0), id - b0, b1.scaled(-1.0)};
}

LaurentSymbol compute_symbol_g(const QuarterPlaneModel& m) {
  validate(m);
  LaurentSymbol bm1 = level_symbol(m, -1);
  LaurentSymbol b0 = level_symbol(m, 0);
  LaurentSymbol b1 = level_symbol(m, 1);
  const double scale = std::max(1.0, bm1.l1() + b0.l1() + b1.l1());

  std::string why = "grid cap reached";
  for (int n = kGridStart; n <= kGridCap; n *= 2) {
    std::vector<cd> vm1 = bm1.eval_on_grid(n);
    std::vector<cd> v0 = b0.eval_on_grid(n);
    std::vector<cd> v1 = b1.eval_on_grid(n);

    std::vector<cd> roots(n);
    bool tie = false;
    double worst_gap = 1.0;
    for (int j = 0; j < n; ++j) {
      // a1 g^2 + a0 g + am1 = 0 with a1 = -b1, a0 = 1 - b0, am1 = -bm1
      auto [r1, r2] = quadratic_roots(v1[j], v0[j] - 1.0, vm1[j]);
      const double m1 = std::abs(r1), m2 = std::abs(r2);
      const double gap = (m2 - m1) / std::max({m1, m2, 1e-30});
      worst_gap = std::min(worst_gap, gap);
      if (gap <= kTieTol) tie = true;
      roots[j] = r1;
    }
    if (tie)
      throw BranchAmbiguousError(
          "minimal-modulus branch is not separated on the unit circle "
          "(relative modulus gap " + std::to_string(worst_gap) + ")");

    // independent branch pick through scalar cyclic reduction on a spread
    // of nodes; disagreement means the interpolation would be meaningless
    int checked = 0;
    bool mismatch = false;
    for (int s = 0; s < 16; ++s) {
      int j = (s * n) / 16;
      cd g;
      if (!scalar_cyclic_reduction(v1[j], v0[j] - 1.0, vm1[j], &g)) continue;
      ++checked;
      if (std::abs(g - roots[j]) > 1e-10 * std::max(1.0, std::abs(g))) mismatch = true;
    }
    if (mismatch)
      throw BranchAmbiguousError(
          "direct branch selection disagrees with cyclic reduction");
    if (checked < 8) {
      why = "cyclic reduction cross-check did not converge on enough nodes";
      continue;
    }

    // interpolate and make sure nothing substantial sits at the fold; the
    // largest coefficient is the right gauge, a sum over the fold half grows
    // with the grid from rounding noise alone
    std::vector<cd> hat = fft::dft_forward(roots);
    for (auto& c : hat) c /= static_cast<double>(n);
    double fold = 0;
    for (int j = n / 4; j <= 3 * n / 4; ++j) fold = std::max(fold, std::abs(hat[j]));
    if (fold > kFoldTol) {
      why = "interpolated coefficients still carry mass at the fold";
      continue;
    }
    LaurentSymbol g = LaurentSymbol::from_grid(roots, 1e-16);

    // mandatory off-grid verification at seeded angles
    std::mt19937_64 rng(20240817u);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
    bool ok = true;
    for (int s = 0; s < 64 && ok; ++s) {
      cd z = std::polar(1.0, ang(rng));
      cd gv = g.eval(z);
      cd res = -b1.eval(z) * gv * gv + (1.0 - b0.eval(z)) * gv - bm1.eval(z);
      if (std::abs(res) > kOffGridTol * scale) ok = false;
    }
    if (!ok) {
      why = "off-grid residual of the interpolated symbol too large";
      continue;
    }
    return g;
  }
  throw ModelError("phase symbol could not be resolved: " + why);
}

EqtMatrix make_gtilde_rank1(double threshold) {
  return EqtMatrix(LaurentSymbol::delta(0, 0.5), CompactCorrection(), {0.5},
                   threshold);
}

EqtMatrix make_gtilde_toeplitz(const LaurentSymbol& g, double threshold) {
  // T(g) ones = g(1) ones + tail; the first column absorbs the tail and the
  // limit entry tops the row sums up to one
  std::vector<double> tail = g.ones_tail();
  CorrectionBuilder cb;
  if (!tail.empty()) {
    Eigen::VectorXd u((Eigen::Index)tail.size());
    for (size_t i = 0; i < tail.size(); ++i) u[(Eigen::Index)i] = -tail[i];
    cb.add_outer(u, Eigen::VectorXd::Ones(1));
  }
  std::vector<double> lim{1.0 - g.sum()};
  return EqtMatrix(g.compressed(std::numeric_limits<double>::epsilon()),
                   cb.finalize(threshold), std::move(lim), threshold);
}

QuarterPlaneModel preset_model(const std::string& name) {
  QuarterPlaneModel m;
  m.name = name;
  auto fill = [&m](std::array<std::array<double, 3>, 3> inner,
                   std::array<std::array<double, 2>, 3> bx, double den) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) m.inner[i][j] = inner[i][j] / den;
      for (int j = 0; j < 2; ++j) m.boundary_x[i][j] = bx[i][j] / den;
    }
  };
  if (name == "test1") {
    fill({{{2, 0, 1}, {1, 0, 1}, {2, 1, 1}}},
         {{{3, 3}, {1, 1}, {0, 1}}}, 9.0);
  } else if (name == "test2") {
    fill({{{2, 0, 1}, {7, 0, 2}, {2, 1, 1}}},
         {{{5, 5}, {2, 2}, {1, 1}}}, 16.0);
  } else if (name == "test3") {
    fill({{{80, 120, 160}, {84, 80, 80}, {160, 124, 80}}},
         {{{484, 121}, {121, 0}, {121, 121}}}, 968.0);
  } else {
    throw ModelError("unknown preset model '" + name + "'");
  }
  validate(m);
  return m;
}

QuarterPlaneModel parse_model(const std::string& text) {
  try {
    json j = json::parse(text);
    QuarterPlaneModel m;
    if (j.contains("name")) m.name = j.at("name").get<std::string>();
    const json& in = j.at("inner");
    const json& bx = j.at("boundary_x");
    if (!in.is_array() || in.size() != 3 || !bx.is_array() || bx.size() != 3)
      throw ModelError("inner and boundary_x must have three rows");
    for (int i = 0; i < 3; ++i) {
      if (!in[i].is_array() || in[i].size() != 3)
        throw ModelError("inner rows must have three entries");
      if (!bx[i].is_array() || bx[i].size() != 2)
        throw ModelError("boundary_x rows must have two entries");
      for (int k = 0; k < 3; ++k) m.inner[i][k] = parse_fraction(in[i][k], "inner");
      for (int k = 0; k < 2; ++k)
        m.boundary_x[i][k] = parse_fraction(bx[i][k], "boundary_x");
    }
    validate(m);
    return m;
  } catch (const json::exception& e) {
    throw ModelError(std::string("malformed model file: ") + e.what());
  }
}

QuarterPlaneModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

std::string save_model(const QuarterPlaneModel& m) {
  json j;
  if (!m.name.empty()) j["name"] = m.name;
  j["inner"] = m.inner;
  j["boundary_x"] = m.boundary_x;
  return j.dump(2);
}

}  // namespace sdaqt
