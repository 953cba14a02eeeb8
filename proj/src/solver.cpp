#include "hjfd/solver.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <vector>

namespace hjfd {

namespace {

double vec_linf(std::span<const double> r) {
  double m = 0.0;
  for (const double v : r) {
    if (std::isnan(v)) return v;
    m = std::max(m, std::abs(v));
  }
  return m;
}

// Backtracking compares the l2 norm: the max norm plateaus while the clamp
// active set settles, which rejects steps that make global progress.
double vec_l2(std::span<const double> r) {
  double s = 0.0;
  for (const double v : r) s += v * v;
  return std::sqrt(s);
}

void pin_boundary(const SchemeEvaluator& eval, GridFunction& v) {
  const Grid& grid = eval.grid();
  for (std::int64_t f = 0; f < grid.num_nodes(); ++f) {
    if (grid.is_boundary(f)) v[f] = eval.boundary_value(f);
  }
}

using ResidualFn = std::function<void(const GridFunction&, std::span<double>)>;

// Newton machinery on the interior unknowns with the 5-per-axis stencil
// sparsity.  Columns are grouped by a distance-5 coloring per axis so one
// perturbed residual evaluation fills 5^d Jacobian columns at once.
class NewtonWorkspace {
 public:
  explicit NewtonWorkspace(const SchemeEvaluator& eval) : eval_(eval) {
    const Grid& grid = eval.grid();
    const auto interior = eval.interior();
    n_ = static_cast<std::int64_t>(interior.size());
    ordinal_.assign(static_cast<std::size_t>(grid.num_nodes()), -1);
    for (std::int64_t k = 0; k < n_; ++k) ordinal_[static_cast<std::size_t>(interior[k])] = k;

    num_colors_ = 1;
    for (int i = 0; i < grid.dim(); ++i) num_colors_ *= 5;
    columns_of_color_.assign(static_cast<std::size_t>(num_colors_), {});
    rows_.resize(static_cast<std::size_t>(n_));
    for (std::int64_t k = 0; k < n_; ++k) {
      const std::int64_t f = interior[k];
      int c = 0;
      int base = 1;
      for (int i = 0; i < grid.dim(); ++i) {
        c += ((grid.component(f, i) - 1) % 5) * base;
        base *= 5;
      }
      columns_of_color_[static_cast<std::size_t>(c)].push_back(k);
      // Rows possibly touched by column k: the stencil around node k.
      auto& rows = rows_[static_cast<std::size_t>(k)];
      rows.push_back(k);
      for (int i = 0; i < grid.dim(); ++i) {
        const int a = grid.component(f, i);
        for (const int step : {-2, -1, 1, 2}) {
          const int t = a + step;
          if (t < 1 || t > grid.count(i)) continue;
          const std::int64_t ord = ordinal_[static_cast<std::size_t>(f + step * grid.stride(i))];
          if (ord >= 0) rows.push_back(ord);
        }
      }
    }
    jac_.resize(n_, n_);
    std::vector<Eigen::Triplet<double>> pattern;
    for (std::int64_t k = 0; k < n_; ++k) {
      for (const std::int64_t r : rows_[static_cast<std::size_t>(k)]) {
        pattern.emplace_back(static_cast<int>(r), static_cast<int>(k), 0.0);
      }
    }
    jac_.setFromTriplets(pattern.begin(), pattern.end());
    jac_.makeCompressed();
    lu_.analyzePattern(jac_);
    rp_.resize(static_cast<std::size_t>(n_));
  }

  std::int64_t unknowns() const { return n_; }
  const SchemeEvaluator& evaluator() const { return eval_; }

  // Fills the Jacobian at v by simultaneous column perturbation; r0 must hold
  // the residual at v.  Returns false when a perturbed residual is not finite.
  bool assemble_jacobian(const ResidualFn& residual, const GridFunction& v,
                         const std::vector<double>& r0, double eps_scale) {
    const auto interior = eval_.interior();
    GridFunction vp = v;
    for (int c = 0; c < num_colors_; ++c) {
      const auto& cols = columns_of_color_[static_cast<std::size_t>(c)];
      if (cols.empty()) continue;
      for (const std::int64_t k : cols) {
        const std::int64_t f = interior[k];
        vp[f] = v[f] + eps_scale * (1.0 + std::abs(v[f]));
      }
      residual(vp, rp_);
      for (const std::int64_t k : cols) {
        const std::int64_t f = interior[k];
        const double eps = eps_scale * (1.0 + std::abs(v[f]));
        for (const std::int64_t r : rows_[static_cast<std::size_t>(k)]) {
          const double d =
              (rp_[static_cast<std::size_t>(r)] - r0[static_cast<std::size_t>(r)]) / eps;
          if (std::isnan(d)) return false;
          jac_.coeffRef(static_cast<int>(r), static_cast<int>(k)) = d;
        }
        vp[f] = v[f];
      }
    }
    return true;
  }

  // Solves J d = -r.  Returns false on a singular or failed factorization.
  bool solve_direction(const std::vector<double>& r, std::vector<double>& d) {
    lu_.factorize(jac_);
    if (lu_.info() != Eigen::Success) return false;
    Eigen::VectorXd rhs(n_);
    for (std::int64_t i = 0; i < n_; ++i) rhs[i] = -r[static_cast<std::size_t>(i)];
    const Eigen::VectorXd step = lu_.solve(rhs);
    if (lu_.info() != Eigen::Success) return false;
    d.resize(static_cast<std::size_t>(n_));
    for (std::int64_t i = 0; i < n_; ++i) {
      if (std::isnan(step[i])) return false;
      d[static_cast<std::size_t>(i)] = step[i];
    }
    return true;
  }

 private:
  const SchemeEvaluator& eval_;
  std::int64_t n_ = 0;
  std::vector<std::int64_t> ordinal_;
  int num_colors_ = 0;
  std::vector<std::vector<std::int64_t>> columns_of_color_;
  std::vector<std::vector<std::int64_t>> rows_;
  Eigen::SparseMatrix<double> jac_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  mutable std::vector<double> rp_;
};

struct NewtonRun {
  int iterations = 0;
  double linf = 0.0;
  bool converged = false;
  bool stalled = false;  // no acceptable step or singular Jacobian before budget
};

// Damped Newton on one residual function; updates v in place.  Steps are
// accepted on an l2 decrease, convergence is declared on the max norm.
NewtonRun damped_newton(NewtonWorkspace& ws, const ResidualFn& residual, GridFunction& v,
                        const SolverConfig& cfg, int max_iters, int stall_cap) {
  const auto interior = ws.evaluator().interior();
  std::vector<double> r(interior.size());
  std::vector<double> rt(interior.size());
  std::vector<double> d;
  GridFunction trial = v;
  NewtonRun run;

  residual(v, r);
  run.linf = vec_linf(r);
  double norm2 = vec_l2(r);
  double best2 = norm2;
  int since_best = 0;

  while (run.iterations < max_iters) {
    if (std::isnan(run.linf)) {
      run.stalled = true;
      return run;
    }
    if (run.linf <= cfg.tolerance) {
      run.converged = true;
      return run;
    }
    bool stepped = false;
    if (ws.assemble_jacobian(residual, v, r, cfg.jacobian_eps) && ws.solve_direction(r, d)) {
      double lambda = 1.0;
      for (int b = 0; b <= cfg.max_backtracks; ++b) {
        for (std::size_t k = 0; k < interior.size(); ++k) {
          trial[interior[k]] = v[interior[k]] + lambda * d[k];
        }
        residual(trial, rt);
        const double trial2 = vec_l2(rt);
        if (!std::isnan(trial2) && trial2 < norm2) {
          v = trial;
          r.swap(rt);
          norm2 = trial2;
          run.linf = vec_linf(r);
          stepped = true;
          break;
        }
        lambda *= cfg.backtrack_factor;
      }
    }
    ++run.iterations;
    if (stepped && norm2 < best2 - 1e-16) {
      best2 = norm2;
      since_best = 0;
    } else {
      ++since_best;
    }
    if (run.linf <= cfg.tolerance) {
      run.converged = true;
      return run;
    }
    if (since_best >= stall_cap) {
      run.stalled = true;
      return run;
    }
  }
  return run;
}

}  // namespace

double tau_max(const Problem& p, const SchemeConfig& cfg, const Grid& grid) {
  double inv_h2_sum = 0.0;
  double grad_sum = 0.0;
  for (int i = 0; i < grid.dim(); ++i) {
    const double h = grid.spacing(i);
    inv_h2_sum += 1.0 / (h * h);
    const double lq =
        i < static_cast<int>(p.lip_q.size()) ? p.lip_q[static_cast<std::size_t>(i)] : 0.0;
    grad_sum += lq / h;
  }
  const double h = grid.hmax();
  const double hp = std::pow(h, cfg.p);
  const double diag_bound =
      p.lip_u + 2.0 * cfg.beta * h * h * inv_h2_sum + 1.5 * cfg.gamma * hp * inv_h2_sum + grad_sum;
  return 0.9 / diag_bound;
}

GridFunction pseudo_sweep(const SchemeEvaluator& eval, double tau, const GridFunction& v) {
  if (!(tau > 0.0)) throw std::invalid_argument("pseudo_sweep: tau must be > 0");
  GridFunction out = v;
  for (const std::int64_t f : eval.interior()) {
    out[f] = v[f] - tau * eval.residual_at(v, f);
  }
  pin_boundary(eval, out);
  return out;
}

GridFunction newton_step(const SchemeEvaluator& eval, const SolverConfig& cfg,
                         const GridFunction& v) {
  NewtonWorkspace ws(eval);
  const ResidualFn residual = [&](const GridFunction& w, std::span<double> out) {
    eval.residual_interior(w, out);
  };
  std::vector<double> r(eval.interior().size());
  residual(v, r);
  const double norm0 = vec_linf(r);
  if (norm0 <= cfg.tolerance) return v;
  if (!ws.assemble_jacobian(residual, v, r, cfg.jacobian_eps)) {
    throw std::runtime_error("newton_step: residual is not finite");
  }
  std::vector<double> d;
  if (!ws.solve_direction(r, d)) {
    throw std::runtime_error("newton_step: singular Jacobian");
  }
  const auto interior = eval.interior();
  GridFunction trial = v;
  double lambda = 1.0;
  std::vector<double> rt(r.size());
  for (int b = 0; b <= cfg.max_backtracks; ++b) {
    for (std::size_t k = 0; k < interior.size(); ++k) {
      trial[interior[k]] = v[interior[k]] + lambda * d[k];
    }
    residual(trial, rt);
    if (vec_l2(rt) < vec_l2(r)) return trial;
    lambda *= cfg.backtrack_factor;
  }
  return trial;  // halving cap hit; caller sees the non-decreasing norm
}

SolveOutcome solve(const Problem& p, const SchemeConfig& cfg, SchemeKind kind,
                   const SolverConfig& solver, const GridFunction& guess,
                   const CutoffBounds* bounds) {
  if (!(solver.tolerance > 0.0)) throw std::invalid_argument("solve: tolerance must be > 0");
  SchemeEvaluator eval(p, guess.grid_ptr(), cfg, kind, bounds);
  if (solver.warn_gamma) {
    const GammaCheck gc = check_gamma(p, cfg, eval.grid());
    if (!gc.sufficient) {
      std::cerr << "hjfd: warning: gamma = " << cfg.gamma
                << " is below the sampled monotonicity estimate " << gc.required << " for problem "
                << p.name << "\n";
    }
  }

  SolveOutcome out{guess, false, 0.0, 0, 0, "newton"};
  pin_boundary(eval, out.solution);
  const double tau = solver.tau > 0.0 ? solver.tau : tau_max(p, cfg, eval.grid());
  const bool trace = std::getenv("HJFD_TRACE") != nullptr;

  const ResidualFn live = [&](const GridFunction& w, std::span<double> r) {
    eval.residual_interior(w, r);
  };

  std::vector<double> r(eval.interior().size());
  eval.residual_interior(out.solution, r);
  double norm = vec_linf(r);

  if (solver.max_newton == 0) {
    out.method = "pseudo-time";
    while (!std::isnan(norm) && norm > solver.tolerance && out.sweeps < solver.max_sweeps) {
      out.solution = pseudo_sweep(eval, tau, out.solution);
      ++out.sweeps;
      eval.residual_interior(out.solution, r);
      norm = vec_linf(r);
    }
    out.residual_norm = norm;
    out.converged = !std::isnan(norm) && norm <= solver.tolerance;
    return out;
  }

  NewtonWorkspace ws(eval);
  auto run_sweeps = [&](int count) {
    for (int s = 0; s < count; ++s) {
      out.solution = pseudo_sweep(eval, tau, out.solution);
      ++out.sweeps;
    }
    out.method = "hybrid";
  };

  if (kind == SchemeKind::Modified) {
    // The cutoff makes the residual piecewise smooth in the clamp branches.
    // Freeze the branch selection, solve that smooth system, reselect, and
    // repeat; the selection settles in a few passes.
    std::vector<SchemeEvaluator::ClampBranch> branches;
    eval.select_branches(out.solution, branches);
    const ResidualFn frozen = [&](const GridFunction& w, std::span<double> rr) {
      eval.residual_interior_frozen(w, branches, rr);
    };
    const int max_passes = 60;
    const int total_budget = 4 * solver.max_newton;
    for (int pass = 0; pass < max_passes && out.iterations < total_budget; ++pass) {
      const int inner_cap = std::min(solver.max_newton, total_budget - out.iterations);
      const NewtonRun run =
          damped_newton(ws, frozen, out.solution, solver, inner_cap, solver.stall_limit);
      out.iterations += run.iterations;
      std::vector<SchemeEvaluator::ClampBranch> fresh;
      eval.select_branches(out.solution, fresh);
      norm = eval.residual_linf(out.solution);
      if (trace) {
        std::cerr << "pass " << pass << " inner " << run.iterations << " frozen-linf " << run.linf
                  << " live-linf " << norm << "\n";
      }
      if (!std::isnan(norm) && norm <= solver.tolerance) {
        out.converged = true;
        break;
      }
      if (fresh == branches) {
        // Selection is consistent but the frozen solve failed; nudge with
        // monotone sweeps before giving up.
        if (run.stalled && out.sweeps < solver.max_sweeps) {
          run_sweeps(solver.hybrid_sweeps);
          eval.select_branches(out.solution, branches);
          continue;
        }
        break;
      }
      branches = fresh;
    }
    out.residual_norm = norm;
    return out;
  }

  std::vector<double> d;
  std::vector<double> rt(r.size());
  GridFunction trial = out.solution;
  double norm2 = vec_l2(r);
  double best = norm2;
  int stall = 0;

  while (out.iterations < solver.max_newton) {
    if (std::isnan(norm)) break;
    if (norm <= solver.tolerance) {
      out.converged = true;
      break;
    }
    bool stepped = false;
    if (ws.assemble_jacobian(live, out.solution, r, solver.jacobian_eps) &&
        ws.solve_direction(r, d)) {
      double lambda = 1.0;
      for (int b = 0; b <= solver.max_backtracks; ++b) {
        const auto interior = eval.interior();
        for (std::size_t k = 0; k < interior.size(); ++k) {
          trial[interior[k]] = out.solution[interior[k]] + lambda * d[k];
        }
        eval.residual_interior(trial, rt);
        const double trial2 = vec_l2(rt);
        if (!std::isnan(trial2) && trial2 < norm2) {
          out.solution = trial;
          r.swap(rt);
          norm2 = trial2;
          norm = vec_linf(r);
          stepped = true;
          break;
        }
        lambda *= solver.backtrack_factor;
      }
    }
    ++out.iterations;
    if (trace) {
      std::cerr << "it " << out.iterations << " linf " << norm << " l2 " << norm2 << " stepped "
                << stepped << "\n";
    }
    if (stepped && norm2 < best - 1e-16) {
      best = norm2;
      stall = 0;
    } else {
      ++stall;
    }
    if (norm <= solver.tolerance) {
      out.converged = true;
      break;
    }
    if (stall >= solver.stall_limit) {
      run_sweeps(solver.hybrid_sweeps);
      eval.residual_interior(out.solution, r);
      norm = vec_linf(r);
      norm2 = vec_l2(r);
      best = std::min(best, norm2);
      stall = 0;
    }
  }
  if (!out.converged && !std::isnan(norm) && norm <= solver.tolerance) out.converged = true;
  out.residual_norm = norm;
  return out;
}

}  // namespace hjfd
