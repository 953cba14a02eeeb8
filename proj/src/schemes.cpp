#include "hjfd/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hjfd {

namespace {

void validate_config(const SchemeConfig& cfg) {
  if (!(cfg.gamma > 0.0)) throw std::invalid_argument("SchemeConfig: gamma must be > 0");
  if (!(cfg.beta >= 0.0)) throw std::invalid_argument("SchemeConfig: beta must be >= 0");
  if (!(cfg.p >= 0.0 && cfg.p <= 1.0)) throw std::invalid_argument("SchemeConfig: p must be in [0, 1]");
  if (!(cfg.cutoff_c > 0.0)) throw std::invalid_argument("SchemeConfig: cutoff_c must be > 0");
}

}  // namespace

double default_gamma(int dim) { return dim == 1 ? 10.0 : 5.0; }

SchemeEvaluator::SchemeEvaluator(const Problem& problem, std::shared_ptr<const Grid> grid,
                                 SchemeConfig config, SchemeKind kind, const CutoffBounds* bounds)
    : problem_(problem),
      grid_(std::move(grid)),
      config_(config),
      kind_(kind),
      bounds_(bounds),
      gvals_(grid_, problem.dirichlet) {
  validate_config(config_);
  if (problem_.dim() != grid_->dim()) {
    throw std::invalid_argument("SchemeEvaluator: problem/grid dimension mismatch");
  }
  if (kind_ == SchemeKind::Modified) {
    if (bounds_ == nullptr) {
      throw std::invalid_argument("SchemeEvaluator: Modified scheme requires cutoff bounds");
    }
    bounds_->validate();
    if (bounds_->lower.size() != grid_->num_nodes()) {
      throw std::invalid_argument("SchemeEvaluator: bounds/grid size mismatch");
    }
  }
  const std::int64_t n = grid_->num_nodes();
  const int d = grid_->dim();
  boundary_.assign(static_cast<std::size_t>(n), 0);
  ring_lo_.assign(static_cast<std::size_t>(n), 0);
  ring_hi_.assign(static_cast<std::size_t>(n), 0);
  coords_.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(d));
  for (std::int64_t f = 0; f < n; ++f) {
    grid_->coords(f, std::span<double>(&coords_[static_cast<std::size_t>(f) * d],
                                       static_cast<std::size_t>(d)));
    bool bnd = false;
    std::uint8_t lo = 0;
    std::uint8_t hi = 0;
    for (int i = 0; i < d; ++i) {
      const int a = grid_->component(f, i);
      if (a == 1 || a == grid_->count(i)) bnd = true;
      if (a == 2) lo |= static_cast<std::uint8_t>(1u << i);
      if (a == grid_->count(i) - 1) hi |= static_cast<std::uint8_t>(1u << i);
    }
    boundary_[static_cast<std::size_t>(f)] = bnd ? 1 : 0;
    ring_lo_[static_cast<std::size_t>(f)] = lo;
    ring_hi_[static_cast<std::size_t>(f)] = hi;
    if (!bnd) interior_.push_back(f);
  }
  hp_ = std::pow(grid_->hmax(), config_.p);
  beta_h2_ = config_.beta * grid_->hmax() * grid_->hmax();
}

double SchemeEvaluator::moment_at(const GridFunction& v, std::int64_t flat, double u) const {
  const int d = grid_->dim();
  const std::uint8_t lo = ring_lo_[static_cast<std::size_t>(flat)];
  const std::uint8_t hi = ring_hi_[static_cast<std::size_t>(flat)];
  const bool quad = config_.bc == BoundaryRule::QuadraticExtension;
  double acc = 0.0;
  for (int i = 0; i < d; ++i) {
    const double h = grid_->spacing(i);
    const double inv4h2 = 1.0 / (4.0 * h * h);
    const std::int64_t s = grid_->stride(i);
    if (lo & (1u << i)) {
      const double gb = gvals_[flat - s];
      const double vp1 = read(v, flat + s);
      const double vp2 = read(v, flat + 2 * s);
      acc += quad ? (3.0 * u - 3.0 * vp1 + vp2 - gb) * inv4h2
                  : (5.0 * u - 4.0 * vp1 + vp2 - 2.0 * gb) * inv4h2;
    } else if (hi & (1u << i)) {
      const double gb = gvals_[flat + s];
      const double vm1 = read(v, flat - s);
      const double vm2 = read(v, flat - 2 * s);
      acc += quad ? (3.0 * u - 3.0 * vm1 + vm2 - gb) * inv4h2
                  : (5.0 * u - 4.0 * vm1 + vm2 - 2.0 * gb) * inv4h2;
    } else {
      acc += (read(v, flat + 2 * s) - 4.0 * read(v, flat + s) + 6.0 * u -
              4.0 * read(v, flat - s) + read(v, flat - 2 * s)) *
             inv4h2;
    }
  }
  return acc;
}

double SchemeEvaluator::extrap_at(const GridFunction& v, std::int64_t flat, double u, int axis,
                                  int sign) const {
  const std::int64_t s = (sign > 0 ? +1 : -1) * grid_->stride(axis);
  const std::uint8_t shell = sign > 0 ? ring_hi_[static_cast<std::size_t>(flat)]
                                      : ring_lo_[static_cast<std::size_t>(flat)];
  if (shell & (1u << axis)) {
    if (config_.bc == BoundaryRule::LinearExtension) return u;
    return 3.0 * u - read(v, flat - s) - gvals_[flat + s];
  }
  return 2.0 * read(v, flat + s) - read(v, flat + 2 * s);
}

double SchemeEvaluator::residual_at(const GridFunction& v, std::int64_t flat) const {
  const int d = grid_->dim();
  const double u = v[flat];
  std::array<double, kMaxDim> q{};
  double lap = 0.0;
  for (int i = 0; i < d; ++i) {
    const double h = grid_->spacing(i);
    const std::int64_t s = grid_->stride(i);
    const double vp = read(v, flat + s);
    const double vm = read(v, flat - s);
    q[static_cast<std::size_t>(i)] = (vp - vm) / (2.0 * h);
    lap += (vp - 2.0 * u + vm) / (h * h);
  }
  const std::span<const double> x(&coords_[static_cast<std::size_t>(flat) * d],
                                  static_cast<std::size_t>(d));
  const double base =
      -beta_h2_ * lap +
      problem_.hamiltonian(std::span<const double>(q.data(), static_cast<std::size_t>(d)), u, x);
  const double g = config_.gamma * hp_;
  switch (kind_) {
    case SchemeKind::LaxFriedrichs:
      return base - 0.5 * g * lap;
    case SchemeKind::HighOrder:
      return base + config_.gamma * hp_ * moment_at(v, flat, u);
    case SchemeKind::Modified: {
      double diag = 0.0;
      double lsum = 0.0;
      for (int i = 0; i < d; ++i) {
        const double inv_h2 = 1.0 / (grid_->spacing(i) * grid_->spacing(i));
        diag += inv_h2;
        const double lp = clamp_L(extrap_at(v, flat, u, i, +1), flat, *bounds_).value;
        const double lm = clamp_L(extrap_at(v, flat, u, i, -1), flat, *bounds_).value;
        lsum += inv_h2 * (lp + lm);
      }
      return base - 0.5 * g * lap + 0.5 * g * diag * u - 0.25 * g * lsum;
    }
  }
  return 0.0;  // unreachable
}

void SchemeEvaluator::residual_interior(const GridFunction& v, std::span<double> out) const {
  if (out.size() != interior_.size()) {
    throw std::invalid_argument("residual_interior: output size mismatch");
  }
  for (std::size_t k = 0; k < interior_.size(); ++k) out[k] = residual_at(v, interior_[k]);
}

double SchemeEvaluator::residual_linf(const GridFunction& v) const {
  double m = 0.0;
  for (const std::int64_t f : interior_) {
    const double r = std::abs(residual_at(v, f));
    if (std::isnan(r)) return r;
    m = std::max(m, r);
  }
  return m;
}

void SchemeEvaluator::select_branches(const GridFunction& v, std::vector<ClampBranch>& out) const {
  const int d = grid_->dim();
  out.assign(interior_.size() * static_cast<std::size_t>(2 * d), ClampBranch::Free);
  if (kind_ != SchemeKind::Modified) return;
  std::size_t slot = 0;
  for (const std::int64_t f : interior_) {
    const double u = v[f];
    const double lo = bounds_->lower[f];
    const double hi = bounds_->upper[f];
    for (int i = 0; i < d; ++i) {
      for (const int sign : {+1, -1}) {
        const double value = extrap_at(v, f, u, i, sign);
        if (value > hi) {
          out[slot] = ClampBranch::AtUpper;
        } else if (value < lo) {
          out[slot] = ClampBranch::AtLower;
        }
        ++slot;
      }
    }
  }
}

void SchemeEvaluator::residual_interior_frozen(const GridFunction& v,
                                               std::span<const ClampBranch> branches,
                                               std::span<double> out) const {
  if (kind_ != SchemeKind::Modified) {
    residual_interior(v, out);
    return;
  }
  const int d = grid_->dim();
  if (out.size() != interior_.size() ||
      branches.size() != interior_.size() * static_cast<std::size_t>(2 * d)) {
    throw std::invalid_argument("residual_interior_frozen: size mismatch");
  }
  const double g = config_.gamma * hp_;
  for (std::size_t k = 0; k < interior_.size(); ++k) {
    const std::int64_t f = interior_[k];
    const double u = v[f];
    std::array<double, kMaxDim> q{};
    double lap = 0.0;
    double diag = 0.0;
    double lsum = 0.0;
    for (int i = 0; i < d; ++i) {
      const double h = grid_->spacing(i);
      const std::int64_t s = grid_->stride(i);
      const double vp = read(v, f + s);
      const double vm = read(v, f - s);
      q[static_cast<std::size_t>(i)] = (vp - vm) / (2.0 * h);
      lap += (vp - 2.0 * u + vm) / (h * h);
      const double inv_h2 = 1.0 / (h * h);
      diag += inv_h2;
      const std::size_t slot = k * static_cast<std::size_t>(2 * d) + static_cast<std::size_t>(2 * i);
      auto pick = [&](ClampBranch b, int sign) {
        switch (b) {
          case ClampBranch::AtUpper: return bounds_->upper[f];
          case ClampBranch::AtLower: return bounds_->lower[f];
          case ClampBranch::Free: break;
        }
        return extrap_at(v, f, u, i, sign);
      };
      lsum += inv_h2 * (pick(branches[slot], +1) + pick(branches[slot + 1], -1));
    }
    const std::span<const double> x(&coords_[static_cast<std::size_t>(f) * d],
                                    static_cast<std::size_t>(d));
    const double base =
        -beta_h2_ * lap +
        problem_.hamiltonian(std::span<const double>(q.data(), static_cast<std::size_t>(d)), u, x);
    out[k] = base - 0.5 * g * lap + 0.5 * g * diag * u - 0.25 * g * lsum;
  }
}

bool SchemeEvaluator::cutoff_active(const GridFunction& v, std::vector<Activation>* list) const {
  if (kind_ != SchemeKind::Modified) return false;
  bool any = false;
  for (const std::int64_t f : interior_) {
    const double u = v[f];
    for (int i = 0; i < grid_->dim(); ++i) {
      for (const int sign : {+1, -1}) {
        const double value = extrap_at(v, f, u, i, sign);
        if (clamp_L(value, f, *bounds_).clamped) {
          any = true;
          if (list != nullptr) list->push_back({f, i, sign, value});
        }
      }
    }
  }
  return any;
}

namespace {

double one_shot(const Problem& p, const SchemeConfig& cfg, SchemeKind kind,
                const CutoffBounds* bounds, const GridFunction& v, const MultiIndex& idx) {
  SchemeEvaluator eval(p, v.grid_ptr(), cfg, kind, bounds);
  return eval.residual_at(v, v.grid().flat(idx));
}

}  // namespace

double residual_lf(const Problem& p, const SchemeConfig& cfg, const GridFunction& v,
                   const MultiIndex& idx) {
  return one_shot(p, cfg, SchemeKind::LaxFriedrichs, nullptr, v, idx);
}

double residual_ho(const Problem& p, const SchemeConfig& cfg, const GridFunction& v,
                   const MultiIndex& idx) {
  return one_shot(p, cfg, SchemeKind::HighOrder, nullptr, v, idx);
}

double residual_modified(const Problem& p, const SchemeConfig& cfg, const CutoffBounds& bounds,
                         const GridFunction& v, const MultiIndex& idx, bool* clamped) {
  SchemeEvaluator eval(p, v.grid_ptr(), cfg, SchemeKind::Modified, &bounds);
  const std::int64_t f = v.grid().flat(idx);
  if (clamped != nullptr) {
    *clamped = false;
    std::vector<SchemeEvaluator::Activation> acts;
    eval.cutoff_active(v, &acts);
    for (const auto& a : acts) {
      if (a.flat == f) *clamped = true;
    }
  }
  return eval.residual_at(v, f);
}

CutoffBounds build_band(const GridFunction& u_lf, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("build_band: c must be > 0");
  const double half_width = c * u_lf.grid().hmax();
  CutoffBounds b{u_lf, u_lf};
  for (std::int64_t i = 0; i < u_lf.size(); ++i) {
    b.lower[i] -= half_width;
    b.upper[i] += half_width;
  }
  return b;
}

CutoffReport cutoff_report(const SchemeEvaluator& eval, const GridFunction& v) {
  CutoffReport report;
  report.active = eval.cutoff_active(v, &report.activations);
  return report;
}

GammaCheck check_gamma(const Problem& p, const SchemeConfig& cfg, const Grid& grid) {
  const int d = grid.dim();
  // Working band for u from the uniform stability bound of the scheme.
  double gmax = 0.0;
  double hmax0 = 0.0;
  {
    std::array<double, kMaxDim> x{};
    const std::span<double> xs(x.data(), static_cast<std::size_t>(d));
    std::vector<double> q0(static_cast<std::size_t>(d), 0.0);
    for (int k = 0; k < (1 << (2 * d)); ++k) {
      int kk = k;  // 4 sample abscissae per axis
      for (int i = 0; i < d; ++i) {
        const int t = kk % 4;
        kk /= 4;
        x[static_cast<std::size_t>(i)] =
            grid.domain().lower(i) + (grid.domain().upper(i) - grid.domain().lower(i)) * t / 3.0;
      }
      gmax = std::max(gmax, std::abs(p.dirichlet(xs)));
      hmax0 = std::max(hmax0, std::abs(p.hamiltonian(q0, 0.0, xs)));
    }
  }
  const double ubound = gmax + hmax0 / std::max(p.theta_min, 1e-12);

  // Sample |dH/dq_i| over a (q, u, x) lattice inside the band.
  double qscale = 1.0;
  for (const double lq : p.lip_q) qscale = std::max(qscale, lq);
  qscale *= 2.0;
  const int nq = 7, nu = 5, nx = 5;
  std::array<double, kMaxDim> x{};
  const std::span<double> xs(x.data(), static_cast<std::size_t>(d));
  std::vector<double> q(static_cast<std::size_t>(d));
  double required = 0.0;
  const double hp = std::pow(grid.hmax(), cfg.p);
  std::vector<int> xi(static_cast<std::size_t>(d), 0);
  // iterate x lattice
  bool done = false;
  while (!done) {
    for (int i = 0; i < d; ++i) {
      x[static_cast<std::size_t>(i)] =
          grid.domain().lower(i) + (grid.domain().upper(i) - grid.domain().lower(i)) *
                                        (xi[static_cast<std::size_t>(i)] + 0.5) / nx;
    }
    for (int ui = 0; ui < nu; ++ui) {
      const double u = -ubound + 2.0 * ubound * ui / (nu - 1);
      for (int axis = 0; axis < d; ++axis) {
        for (int qi = 0; qi < nq; ++qi) {
          for (int i = 0; i < d; ++i) q[static_cast<std::size_t>(i)] = 0.0;
          q[static_cast<std::size_t>(axis)] = -qscale + 2.0 * qscale * qi / (nq - 1);
          const double dq = 1e-5 * qscale;
          const double qs = q[static_cast<std::size_t>(axis)];
          q[static_cast<std::size_t>(axis)] = qs + dq;
          const double hi_v = p.hamiltonian(q, u, xs);
          q[static_cast<std::size_t>(axis)] = qs - dq;
          const double lo_v = p.hamiltonian(q, u, xs);
          const double slope = std::abs(hi_v - lo_v) / (2.0 * dq);
          required = std::max(required, slope * grid.spacing(axis) / hp);
        }
      }
    }
    done = true;
    for (int i = 0; i < d; ++i) {
      if (++xi[static_cast<std::size_t>(i)] < nx) {
        done = false;
        break;
      }
      xi[static_cast<std::size_t>(i)] = 0;
    }
  }
  GammaCheck out;
  out.required = required;
  out.sufficient = cfg.gamma + 1e-9 >= required;
  return out;
}

}  // namespace hjfd
