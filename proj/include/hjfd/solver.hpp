#pragma once

#include <cstdint>
#include <string>

#include "hjfd/schemes.hpp"

namespace hjfd {

struct SolverConfig {
  double tolerance = 1e-10;     // convergence on the interior residual max norm
  int max_newton = 50;          // 0 disables Newton (pure pseudo-time)
  double jacobian_eps = 1e-7;   // column perturbation scale, eps * (1 + |V|)
  double backtrack_factor = 0.5;
  int max_backtracks = 30;
  double tau = 0.0;             // pseudo-time step; 0 selects tau_max
  long max_sweeps = 200000;     // pseudo-time budget when Newton is disabled
  int stall_limit = 5;          // Newton iterations without progress before sweeps
  int hybrid_sweeps = 100;      // sweeps injected on a Newton stall
  bool warn_gamma = true;       // stderr note when gamma looks too small
};

struct SolveOutcome {
  GridFunction solution;
  bool converged = false;
  double residual_norm = 0.0;
  int iterations = 0;  // Newton iterations taken
  long sweeps = 0;     // pseudo-time sweeps taken
  std::string method;  // "newton", "pseudo-time", or "hybrid"
};

/// Largest pseudo-time step for which the explicit update stays nondecreasing
/// in the center value: 0.9 over the bound on the residual's diagonal
/// sensitivity.
double tau_max(const Problem& p, const SchemeConfig& cfg, const Grid& grid);

/// One explicit update of all interior nodes from the frozen iterate;
/// boundary rows are reset to the Dirichlet data.
GridFunction pseudo_sweep(const SchemeEvaluator& eval, double tau, const GridFunction& v);

/// One damped Newton step on the interior residual system.  Returns the input
/// unchanged when its residual is already below the tolerance.
GridFunction newton_step(const SchemeEvaluator& eval, const SolverConfig& cfg,
                         const GridFunction& v);

/// Drive the chosen scheme's residual to a root.  Boundary rows of the guess
/// are pinned to the Dirichlet data.  Non-convergence is reported in the
/// outcome, never as a silent partial answer.
SolveOutcome solve(const Problem& p, const SchemeConfig& cfg, SchemeKind kind,
                   const SolverConfig& solver, const GridFunction& guess,
                   const CutoffBounds* bounds = nullptr);

}  // namespace hjfd
