#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <string>

#include "sdaqt/eqt_matrix.hpp"
#include "sdaqt/errors.hpp"
#include "sdaqt/qbd_models.hpp"
#include "sdaqt/sda.hpp"

namespace {

using namespace sdaqt;

struct CommonOptions {
  std::string model;
  std::string method = "sda2";
  double tol = 1e-14;
  int max_iter = -1;  // -1: per-method default
  double threshold = 0;
  std::string format = "text";
  std::string save_path;
};

double env_threshold() {
  if (const char* s = std::getenv("SDAQT_THRESHOLD")) {
    try {
      double t = std::stod(s);
      if (t > 0) return t;
    } catch (...) {
    }
    std::cerr << "warning: ignoring invalid SDAQT_THRESHOLD '" << s << "'\n";
  }
  return EqtMatrix::kDefaultThreshold;
}

QuarterPlaneModel resolve_model(const std::string& spec) {
  if (std::filesystem::exists(spec)) return load_model(spec);
  return preset_model(spec);
}

bool is_doubling(const std::string& method) { return method.rfind("sda", 0) == 0; }

SolveReport<EqtMatrix> run_method(const QuarterPlaneModel& model,
                                  const CommonOptions& opt) {
  QbdCoefficients c = build_coefficients(model, opt.threshold);
  StopRule stop{opt.tol, opt.max_iter > 0 ? opt.max_iter
                                          : (is_doubling(opt.method) ? 64 : 100000)};
  const std::vector<double> unit{1.0};

  if (opt.method == "sda") {
    if (classify_drift(model) == SolutionClass::kEqt)
      std::cerr << "warning: the minimal solution of this model has a nonzero "
                   "limit part, which plain doubling cannot represent; expect "
                   "stagnation far from the solution\n";
    return run_sda(c.am1, c.a0, c.a1, InitScheme<EqtMatrix>{StandardScheme<EqtMatrix>{}},
                   stop);
  }
  if (opt.method == "sda1" || opt.method == "fpi1") {
    EqtMatrix gt = make_gtilde_rank1(opt.threshold);
    if (opt.method == "sda1")
      return run_sda(c.am1, c.a0, c.a1,
                     InitScheme<EqtMatrix>{ImprovedScheme<EqtMatrix>{gt, unit}}, stop);
    return run_fixed_point(c.am1, c.a0, c.a1, gt, stop);
  }
  if (opt.method == "sda2" || opt.method == "fpi2") {
    EqtMatrix gt = make_gtilde_toeplitz(compute_symbol_g(model), opt.threshold);
    if (opt.method == "sda2")
      return run_sda(c.am1, c.a0, c.a1,
                     InitScheme<EqtMatrix>{ImprovedScheme<EqtMatrix>{gt, unit}}, stop);
    return run_fixed_point(c.am1, c.a0, c.a1, gt, stop);
  }
  throw std::invalid_argument("unknown method '" + opt.method +
                              "' (expected sda, sda1, sda2, fpi1 or fpi2)");
}

int exit_code(Termination t) {
  switch (t) {
    case Termination::kConverged: return 0;
    case Termination::kStagnated: return 2;
    case Termination::kBreakdown: return 3;
    case Termination::kMaxIter: return 4;
  }
  return 1;
}

void print_solve(const QuarterPlaneModel& model, const CommonOptions& opt,
                 const SolveReport<EqtMatrix>& rep) {
  const std::string name = model.name.empty() ? opt.model : model.name;
  if (opt.format == "csv") {
    std::cout << "model,method,seconds,iterations,residual,termination\n"
              << name << ',' << opt.method << ',' << rep.wall_seconds << ','
              << rep.iterations << ',' << rep.residual << ','
              << to_string(rep.termination) << "\n";
    return;
  }
  if (opt.format == "json") {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["model"] = name;
    j["method"] = opt.method;
    j["termination"] = to_string(rep.termination);
    j["iterations"] = rep.iterations;
    j["residual"] = rep.residual;
    j["wall_seconds"] = rep.wall_seconds;
    j["residual_history"] = rep.residual_history;
    if (!rep.diagnostic.empty()) j["diagnostic"] = rep.diagnostic;
    j["solution"] = nlohmann::json::parse(rep.solution.to_json());
    std::cout << j.dump(2) << "\n";
    return;
  }
  StructureStats st = rep.solution.structure_stats();
  std::cout << "model:        " << name << "\n"
            << "method:       " << opt.method << "\n"
            << "termination:  " << to_string(rep.termination) << "\n"
            << "iterations:   " << rep.iterations << "\n"
            << "residual:     " << rep.residual << "\n"
            << "wall-seconds: " << rep.wall_seconds << "\n"
            << "structure:    lb=" << st.lb << " ub=" << st.ub << " rc=" << st.rc
            << " cc=" << st.cc << " rk=" << st.rk << " lim=" << st.lim << "\n";
  if (!rep.diagnostic.empty()) std::cout << "diagnostic:   " << rep.diagnostic << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"minimal solvent of A1 X^2 + A0 X + Am1 = 0 for quarter-plane "
               "random walks over quasi-Toeplitz matrices"};
  app.require_subcommand(1);

  CommonOptions opt;
  opt.threshold = env_threshold();

  auto add_common = [&opt](CLI::App* cmd, bool with_method = true) {
    cmd->add_option("-m,--model", opt.model,
                    "model preset name (test1, test2, test3) or json file path")
        ->required();
    if (with_method)
      cmd->add_option("--method", opt.method,
                      "sda, sda1, sda2, fpi1 or fpi2 (default sda2)");
    cmd->add_option("--tol", opt.tol, "residual tolerance (default 1e-14)");
    cmd->add_option("--max-iter", opt.max_iter,
                    "step budget (default 64 doubling, 100000 fixed point)");
    cmd->add_option("--threshold", opt.threshold,
                    "matrix compression threshold (default 1e-15, or "
                    "SDAQT_THRESHOLD)");
  };

  CLI::App* solve = app.add_subcommand("solve", "run one solver and report");
  add_common(solve);
  solve->add_option("--format", opt.format, "text, csv or json (default text)")
      ->check(CLI::IsMember({"text", "csv", "json"}));
  solve->add_option("--save", opt.save_path, "write the solution matrix as json");

  CLI::App* bench = app.add_subcommand("bench", "time one solver run, csv output");
  add_common(bench);

  CLI::App* inspect =
      app.add_subcommand("inspect", "solve and print solution structure, csv output");
  add_common(inspect);

  CLI11_PARSE(app, argc, argv);

  try {
    QuarterPlaneModel model = resolve_model(opt.model);
    SolveReport<EqtMatrix> rep = run_method(model, opt);
    const std::string name = model.name.empty() ? opt.model : model.name;

    if (!opt.save_path.empty()) {
      std::ofstream out(opt.save_path);
      if (!out) throw std::runtime_error("cannot write '" + opt.save_path + "'");
      out << rep.solution.to_json() << "\n";
    }

    if (app.got_subcommand(solve)) {
      print_solve(model, opt, rep);
    } else if (app.got_subcommand(bench)) {
      std::cout << "model,method,seconds,iterations,residual\n"
                << name << ',' << opt.method << ',' << rep.wall_seconds << ','
                << rep.iterations << ',' << rep.residual << "\n";
    } else {
      StructureStats st = rep.solution.structure_stats();
      std::cout << "test,lb,ub,rc,cc,rk,lim\n"
                << name << ',' << st.lb << ',' << st.ub << ',' << st.rc << ','
                << st.cc << ',' << st.rk << ',' << st.lim << "\n";
    }
    if (rep.termination == Termination::kBreakdown && !rep.diagnostic.empty())
      std::cerr << "breakdown: " << rep.diagnostic << "\n";
    return exit_code(rep.termination);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
