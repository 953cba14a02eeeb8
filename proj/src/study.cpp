#include "hjfd/study.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace hjfd {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string order_field(double order) {
  if (std::isnan(order)) return "";
  if (std::isinf(order)) return "exact";
  return fmt("%.3f", order);
}

std::string scheme_name(SchemeKind k) {
  switch (k) {
    case SchemeKind::LaxFriedrichs: return "lf";
    case SchemeKind::HighOrder: return "ho";
    case SchemeKind::Modified: return "mod";
  }
  return "?";
}

double interior_error(const GridFunction& u, const Problem& p) {
  const Grid& grid = u.grid();
  std::array<double, kMaxDim> x{};
  const std::span<double> xs(x.data(), static_cast<std::size_t>(grid.dim()));
  double m = 0.0;
  for (std::int64_t f = 0; f < grid.num_nodes(); ++f) {
    if (grid.is_boundary(f)) continue;
    grid.coords(f, xs);
    m = std::max(m, std::abs(u[f] - p.exact(xs)));
  }
  return m;
}

}  // namespace

std::vector<double> observed_order(std::span<const double> errors, std::span<const double> hs) {
  if (errors.size() != hs.size()) throw std::invalid_argument("observed_order: size mismatch");
  std::vector<double> orders(errors.size(), kNan);
  for (std::size_t k = 1; k < errors.size(); ++k) {
    if (!(errors[k - 1] > 0.0) || !(hs[k - 1] > 0.0) || !(hs[k] > 0.0)) continue;
    if (errors[k] == 0.0) {
      orders[k] = std::numeric_limits<double>::infinity();
    } else {
      orders[k] = std::log(errors[k - 1] / errors[k]) / std::log(hs[k - 1] / hs[k]);
    }
  }
  return orders;
}

StudyReport run_study(const StudyPlan& plan) {
  if (plan.levels.size() < 2) {
    throw std::invalid_argument("run_study: at least two levels are needed for orders");
  }
  for (std::size_t i = 1; i < plan.levels.size(); ++i) {
    if (plan.levels[i] <= plan.levels[i - 1]) {
      throw std::invalid_argument("run_study: node counts must be strictly increasing");
    }
  }
  const Problem prob = registry(plan.problem);
  const int d = prob.dim();

  SchemeConfig cfg = plan.scheme_config;
  if (cfg.gamma <= 0.0) cfg.gamma = default_gamma(d);

  StudyReport report;
  report.plan = plan;
  report.plan.scheme_config = cfg;
  report.completed = true;

  std::vector<double> lower(static_cast<std::size_t>(d)), upper(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    lower[static_cast<std::size_t>(i)] = prob.box.lower(i);
    upper[static_cast<std::size_t>(i)] = prob.box.upper(i);
  }

  for (std::size_t li = 0; li < plan.levels.size(); ++li) {
    const auto t0 = std::chrono::steady_clock::now();
    const int n = plan.levels[li];
    const auto grid = make_grid(lower, upper, std::vector<int>(static_cast<std::size_t>(d), n));

    LevelResult row;
    row.level = static_cast<int>(li) + 1;
    row.nodes_per_axis = n;
    row.h = grid->hmax();
    row.error = kNan;
    row.order = kNan;

    // LF is solved first on every level: it is either the target scheme or
    // the seed (and the band center) for the corrector schemes.
    const GridFunction zero(grid, 0.0);
    const SolveOutcome lf = solve(prob, cfg, SchemeKind::LaxFriedrichs, plan.solver_config, zero);
    SolveOutcome target = lf;
    if (lf.converged && plan.scheme != SchemeKind::LaxFriedrichs) {
      if (plan.scheme == SchemeKind::HighOrder) {
        target = solve(prob, cfg, SchemeKind::HighOrder, plan.solver_config, lf.solution);
      } else {
        const CutoffBounds band = build_band(lf.solution, cfg.cutoff_c);
        target =
            solve(prob, cfg, SchemeKind::Modified, plan.solver_config, lf.solution, &band);
        if (target.converged) {
          SchemeEvaluator eval(prob, grid, cfg, SchemeKind::Modified, &band);
          row.cutoff = cutoff_report(eval, target.solution).active ? "yes" : "no";
        }
      }
    }

    row.converged = target.converged;
    row.iterations = target.iterations;
    row.sweeps = target.sweeps;
    if (target.converged && prob.has_exact()) {
      row.error = interior_error(target.solution, prob);
    }
    row.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.rows.push_back(row);
    if (!target.converged) {
      report.completed = false;
      break;
    }
  }

  std::vector<double> errs, hs;
  for (const auto& row : report.rows) {
    errs.push_back(row.error);
    hs.push_back(row.h);
  }
  const std::vector<double> orders = observed_order(errs, hs);
  for (std::size_t i = 0; i < report.rows.size(); ++i) report.rows[i].order = orders[i];
  return report;
}

void write_csv(const StudyReport& report, std::ostream& os) {
  os << "level,J,h,error,order,cutoff,iterations,seconds\n";
  for (const auto& r : report.rows) {
    os << r.level << ',' << r.nodes_per_axis << ',' << fmt("%.6e", r.h) << ','
       << (std::isnan(r.error) ? std::string() : fmt("%.6e", r.error)) << ','
       << order_field(r.order) << ',' << r.cutoff << ',' << r.iterations << ','
       << fmt("%.3f", r.seconds) << '\n';
  }
}

void write_text(const StudyReport& report, std::ostream& os) {
  const auto& cfg = report.plan.scheme_config;
  os << "problem " << report.plan.problem << ", scheme " << scheme_name(report.plan.scheme)
     << ", bc " << (cfg.bc == BoundaryRule::LinearExtension ? "lin" : "quad") << ", gamma "
     << cfg.gamma << ", p " << cfg.p << ", beta " << cfg.beta;
  if (report.plan.scheme == SchemeKind::Modified) os << ", c " << cfg.cutoff_c;
  os << '\n';
  os << "      J           h       Error   Order  Cutoff   Iters   Seconds\n";
  for (const auto& r : report.rows) {
    char line[160];
    std::snprintf(line, sizeof(line), "%7d  %10.2e  %10.2e  %6s  %6s  %6d  %8.3f\n",
                  r.nodes_per_axis, r.h, r.error,
                  order_field(r.order).empty() ? "--" : order_field(r.order).c_str(),
                  r.cutoff.empty() ? "-" : r.cutoff.c_str(), r.iterations, r.seconds);
    os << line;
  }
  if (!report.completed) os << "study aborted: solver failed to converge at the last level\n";
}

}  // namespace hjfd
