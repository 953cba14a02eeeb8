#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hjfd/study.hpp"

namespace {

using namespace hjfd;

SchemeKind parse_scheme(const std::string& s) {
  if (s == "lf") return SchemeKind::LaxFriedrichs;
  if (s == "ho") return SchemeKind::HighOrder;
  if (s == "mod") return SchemeKind::Modified;
  throw CLI::ValidationError("--scheme", "expected one of lf|ho|mod");
}

BoundaryRule parse_bc(const std::string& s) {
  if (s == "lin") return BoundaryRule::LinearExtension;
  if (s == "quad") return BoundaryRule::QuadraticExtension;
  throw CLI::ValidationError("--bc", "expected one of lin|quad");
}

std::string resolve_out(const std::string& path) {
  if (path.empty()) return path;
  const char* dir = std::getenv("HJFD_OUT_DIR");
  if (dir != nullptr && *dir != '\0' && std::filesystem::path(path).is_relative()) {
    return (std::filesystem::path(dir) / path).string();
  }
  return path;
}

std::vector<int> parse_levels(const std::string& csv) {
  std::vector<int> levels;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) levels.push_back(std::stoi(tok));
  }
  return levels;
}

struct CommonFlags {
  std::string problem;
  std::string scheme = "ho";
  std::string bc = "lin";
  double gamma = 0.0;  // 0: per-dimension default
  double p = 1.0;
  double beta = 0.0;
  double c = 10.0;
  double tol = 1e-10;
  std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--problem", flags.problem, "registry problem name")->required();
  cmd->add_option("--scheme", flags.scheme, "lf|ho|mod")->default_val("ho");
  cmd->add_option("--bc", flags.bc, "auxiliary boundary operator, lin|quad")->default_val("lin");
  cmd->add_option("--gamma", flags.gamma, "moment strength (default 10 in 1D, 5 in 2D)");
  cmd->add_option("--p", flags.p, "moment scaling exponent")->default_val(1.0);
  cmd->add_option("--beta", flags.beta, "h^2-scaled viscosity coefficient")->default_val(0.0);
  cmd->add_option("--c", flags.c, "cutoff band radius multiplier")->default_val(10.0);
  cmd->add_option("--tol", flags.tol, "residual tolerance")->default_val(1e-10);
  cmd->add_option("--out", flags.out, "output file (CSV)");
}

SchemeConfig make_config(const CommonFlags& flags) {
  SchemeConfig cfg;
  cfg.beta = flags.beta;
  cfg.gamma = flags.gamma;
  cfg.p = flags.p;
  cfg.bc = parse_bc(flags.bc);
  cfg.cutoff_c = flags.c;
  return cfg;
}

int run_solve(const CommonFlags& flags, int n) {
  const Problem prob = registry(flags.problem);
  SchemeConfig cfg = make_config(flags);
  if (cfg.gamma <= 0.0) cfg.gamma = default_gamma(prob.dim());
  const SchemeKind kind = parse_scheme(flags.scheme);
  SolverConfig solver;
  solver.tolerance = flags.tol;

  std::vector<double> lower, upper;
  for (int i = 0; i < prob.dim(); ++i) {
    lower.push_back(prob.box.lower(i));
    upper.push_back(prob.box.upper(i));
  }
  const auto grid = make_grid(lower, upper, std::vector<int>(static_cast<std::size_t>(prob.dim()), n));

  const GridFunction zero(grid, 0.0);
  const SolveOutcome lf = solve(prob, cfg, SchemeKind::LaxFriedrichs, solver, zero);
  SolveOutcome target = lf;
  std::string cutoff;
  if (lf.converged && kind != SchemeKind::LaxFriedrichs) {
    if (kind == SchemeKind::HighOrder) {
      target = solve(prob, cfg, SchemeKind::HighOrder, solver, lf.solution);
    } else {
      const CutoffBounds band = build_band(lf.solution, cfg.cutoff_c);
      target = solve(prob, cfg, SchemeKind::Modified, solver, lf.solution, &band);
      if (target.converged) {
        SchemeEvaluator eval(prob, grid, cfg, SchemeKind::Modified, &band);
        cutoff = cutoff_report(eval, target.solution).active ? "yes" : "no";
      }
    }
  }

  std::cout << "problem " << prob.name << ", scheme " << flags.scheme << ", bc " << flags.bc
            << ", J " << n << ", h " << grid->hmax() << '\n';
  std::cout << "converged " << (target.converged ? "yes" : "no") << ", method " << target.method
            << ", iterations " << target.iterations << ", residual " << target.residual_norm
            << '\n';
  if (target.converged && prob.has_exact()) {
    const GridFunction exact = sample(grid, prob.exact);
    double worst = 0.0;
    std::int64_t arg = -1;
    for (std::int64_t f = 0; f < grid->num_nodes(); ++f) {
      if (grid->is_boundary(f)) continue;
      const double e = std::abs(target.solution[f] - exact[f]);
      if (e > worst) {
        worst = e;
        arg = f;
      }
    }
    std::cout << "linf error " << worst << " at (";
    std::array<double, kMaxDim> x{};
    grid->coords(arg, std::span<double>(x.data(), static_cast<std::size_t>(prob.dim())));
    for (int i = 0; i < prob.dim(); ++i) std::cout << (i ? ", " : "") << x[static_cast<std::size_t>(i)];
    std::cout << ")\n";
  }
  if (!cutoff.empty()) std::cout << "cutoff " << cutoff << '\n';

  const std::string path = resolve_out(flags.out);
  if (!path.empty() && target.converged) {
    std::ofstream os(path);
    if (!os) {
      std::cerr << "hjfd: cannot write " << path << '\n';
      return 2;
    }
    for (int i = 0; i < prob.dim(); ++i) os << 'x' << (i + 1) << ',';
    os << "u\n";
    std::array<double, kMaxDim> x{};
    const std::span<double> xs(x.data(), static_cast<std::size_t>(prob.dim()));
    char buf[32];
    for (std::int64_t f = 0; f < grid->num_nodes(); ++f) {
      grid->coords(f, xs);
      for (int i = 0; i < prob.dim(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.12e", xs[static_cast<std::size_t>(i)]);
        os << buf << ',';
      }
      std::snprintf(buf, sizeof(buf), "%.12e", target.solution[f]);
      os << buf << '\n';
    }
  }
  return target.converged ? 0 : 1;
}

int run_study_cmd(const CommonFlags& flags, const std::string& levels_csv,
                  const std::string& format) {
  StudyPlan plan;
  plan.problem = flags.problem;
  plan.scheme = parse_scheme(flags.scheme);
  plan.scheme_config = make_config(flags);
  plan.solver_config.tolerance = flags.tol;
  plan.levels = parse_levels(levels_csv);
  plan.output_path = resolve_out(flags.out);

  if (format != "csv" && format != "text") {
    throw CLI::ValidationError("--format", "expected csv|text");
  }
  const StudyReport report = run_study(plan);
  const auto emit = [&](std::ostream& os) {
    if (format == "text") {
      write_text(report, os);
    } else {
      write_csv(report, os);
    }
  };
  if (!plan.output_path.empty()) {
    std::ofstream os(plan.output_path);
    if (!os) {
      std::cerr << "hjfd: cannot write " << plan.output_path << '\n';
      return 2;
    }
    emit(os);
  } else {
    emit(std::cout);
  }
  return report.completed ? 0 : 1;
}

int run_verify(int samples) {
  double worst = 0.0;
  for (const auto& name : registry_names()) {
    const Problem prob = registry(name);
    const double defect = verify_manufactured(prob, samples, /*seed=*/20240915u);
    std::cout << name << " max defect " << defect << '\n';
    worst = std::max(worst, defect);
  }
  const bool ok = worst <= 1e-12;
  std::cout << (ok ? "all manufactured solutions verified" : "manufactured-solution check FAILED")
            << '\n';
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-difference solvers for stationary Hamilton-Jacobi equations"};
  app.require_subcommand(1);

  CommonFlags solve_flags;
  int n = 0;
  CLI::App* solve_cmd = app.add_subcommand("solve", "solve one problem on a single mesh");
  add_common(solve_cmd, solve_flags);
  solve_cmd->add_option("--n", n, "nodes per axis")->required()->check(CLI::Range(5, 100000));

  CommonFlags study_flags;
  std::string levels_csv;
  std::string format = "csv";
  CLI::App* study_cmd = app.add_subcommand("study", "mesh-refinement study with observed orders");
  add_common(study_cmd, study_flags);
  study_cmd->add_option("--levels", levels_csv, "comma-separated nodes per axis")->required();
  study_cmd->add_option("--format", format, "csv|text")->default_val("csv");

  int samples = 1000;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "check the manufactured forcings of the registry");
  verify_cmd->add_option("--samples", samples, "random sample count")->default_val(1000);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (solve_cmd->parsed()) return run_solve(solve_flags, n);
    if (study_cmd->parsed()) return run_study_cmd(study_flags, levels_csv, format);
    if (verify_cmd->parsed()) return run_verify(samples);
  } catch (const std::exception& e) {
    std::cerr << "hjfd: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
