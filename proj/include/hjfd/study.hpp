#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hjfd/solver.hpp"

namespace hjfd {

struct StudyPlan {
  std::string problem;
  SchemeKind scheme = SchemeKind::LaxFriedrichs;
  SchemeConfig scheme_config;  // gamma <= 0 selects the per-dimension default
  SolverConfig solver_config;
  std::vector<int> levels;  // per-axis node counts, strictly increasing
  std::string output_path;  // empty: no file written by the CLI
};

struct LevelResult {
  int level = 0;
  int nodes_per_axis = 0;
  double h = 0.0;
  double error = 0.0;     // NaN when the problem has no exact solution
  double order = 0.0;     // NaN when undefined, +inf when the error hit zero
  std::string cutoff;     // "yes" / "no" for the modified scheme, else ""
  int iterations = 0;     // Newton iterations of the target solve
  long sweeps = 0;
  double seconds = 0.0;   // wall time for the level, including the LF seed solve
  bool converged = false;
};

struct StudyReport {
  StudyPlan plan;
  std::vector<LevelResult> rows;
  bool completed = false;  // false when a level failed to converge
};

/// Per level: build the grid, solve Lax-Friedrichs from the zero guess, and
/// (for the other schemes) solve the target from the LF seed, with the
/// cutoff band U_LF +/- c h for the modified scheme.
StudyReport run_study(const StudyPlan& plan);

/// Observed orders ln(e_{k-1}/e_k) / ln(h_{k-1}/h_k); the first entry is NaN.
std::vector<double> observed_order(std::span<const double> errors, std::span<const double> hs);

void write_csv(const StudyReport& report, std::ostream& os);
void write_text(const StudyReport& report, std::ostream& os);

}  // namespace hjfd
