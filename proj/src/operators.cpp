#include "hjfd/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace hjfd {

namespace {

// Reads V at a node, substituting the Dirichlet value at boundary nodes.
inline double read(const GridFunction& v, const DirichletData& g, const Grid& grid,
                   std::int64_t flat) {
  return grid.is_boundary(flat) ? g[flat] : v[flat];
}

}  // namespace

DirichletData::DirichletData(const std::shared_ptr<const Grid>& grid, const SpatialFn& g)
    : grid_(grid), values_(static_cast<std::size_t>(grid->num_nodes()), 0.0) {
  std::array<double, kMaxDim> x{};
  const std::span<double> xs(x.data(), static_cast<std::size_t>(grid->dim()));
  for (std::int64_t f = 0; f < grid->num_nodes(); ++f) {
    if (grid->is_boundary(f)) {
      grid->coords(f, xs);
      values_[static_cast<std::size_t>(f)] = g(xs);
    }
  }
}

void CutoffBounds::validate() const {
  if (lower.size() != upper.size()) {
    throw std::invalid_argument("CutoffBounds: lower/upper size mismatch");
  }
  for (std::int64_t i = 0; i < lower.size(); ++i) {
    if (!(lower[i] <= upper[i])) {
      throw std::invalid_argument("CutoffBounds: requires lower <= upper at every node");
    }
  }
}

double diff_sided(const GridFunction& v, int axis, int sign, const MultiIndex& idx) {
  const Grid& g = v.grid();
  const ShiftResult n = g.shift(idx, axis, sign > 0 ? +1 : -1);
  if (!n.inside) {
    throw std::logic_error("diff_sided: referenced neighbor is off the grid");
  }
  const double vn = v[g.flat(n.index)];
  const double v0 = v[g.flat(idx)];
  return sign > 0 ? (vn - v0) / g.spacing(axis) : (v0 - vn) / g.spacing(axis);
}

std::vector<double> gradient_central(const GridFunction& v, const MultiIndex& idx) {
  const Grid& g = v.grid();
  std::vector<double> q(static_cast<std::size_t>(g.dim()));
  const std::int64_t f = g.flat(idx);
  for (int i = 0; i < g.dim(); ++i) {
    if (idx[i] <= 1 || idx[i] >= g.count(i)) {
      throw std::logic_error("gradient_central: referenced neighbor is off the grid");
    }
    q[static_cast<std::size_t>(i)] =
        (v[f + g.stride(i)] - v[f - g.stride(i)]) / (2.0 * g.spacing(i));
  }
  return q;
}

double laplacian_h(const GridFunction& v, const MultiIndex& idx) {
  const Grid& g = v.grid();
  const std::int64_t f = g.flat(idx);
  double acc = 0.0;
  for (int i = 0; i < g.dim(); ++i) {
    if (idx[i] <= 1 || idx[i] >= g.count(i)) {
      throw std::logic_error("laplacian_h: referenced neighbor is off the grid");
    }
    const double h = g.spacing(i);
    acc += (v[f + g.stride(i)] - 2.0 * v[f] + v[f - g.stride(i)]) / (h * h);
  }
  return acc;
}

double moment(const GridFunction& v, const MultiIndex& idx, const DirichletData& g,
              BoundaryRule bc) {
  const Grid& grid = v.grid();
  const std::int64_t f = grid.flat(idx);
  if (grid.is_boundary(f)) {
    throw std::logic_error("moment: index must be an interior node");
  }
  const double u = v[f];
  double acc = 0.0;
  for (int i = 0; i < grid.dim(); ++i) {
    const double h = grid.spacing(i);
    const double inv4h2 = 1.0 / (4.0 * h * h);
    const std::int64_t s = grid.stride(i);
    const int a = idx[i];
    if (a == 2) {  // boundary at a - e_i, ghost at a - 2 e_i
      const double gb = g[f - s];
      const double vp1 = read(v, g, grid, f + s);
      const double vp2 = read(v, g, grid, f + 2 * s);
      acc += (bc == BoundaryRule::LinearExtension)
                 ? (5.0 * u - 4.0 * vp1 + vp2 - 2.0 * gb) * inv4h2
                 : (3.0 * u - 3.0 * vp1 + vp2 - gb) * inv4h2;
    } else if (a == grid.count(i) - 1) {  // mirrored on the right
      const double gb = g[f + s];
      const double vm1 = read(v, g, grid, f - s);
      const double vm2 = read(v, g, grid, f - 2 * s);
      acc += (bc == BoundaryRule::LinearExtension)
                 ? (5.0 * u - 4.0 * vm1 + vm2 - 2.0 * gb) * inv4h2
                 : (3.0 * u - 3.0 * vm1 + vm2 - gb) * inv4h2;
    } else {
      const double vp1 = read(v, g, grid, f + s);
      const double vm1 = read(v, g, grid, f - s);
      const double vp2 = read(v, g, grid, f + 2 * s);
      const double vm2 = read(v, g, grid, f - 2 * s);
      acc += (vp2 - 4.0 * vp1 + 6.0 * u - 4.0 * vm1 + vm2) * inv4h2;
    }
  }
  return acc;
}

SparseRow staggered_laplacian_row(const Grid& grid, const MultiIndex& idx, BoundaryRule bc) {
  const std::int64_t f = grid.flat(idx);
  if (grid.is_boundary(f)) {
    throw std::logic_error("staggered_laplacian_row: index must be an interior node");
  }
  SparseRow row;
  double diag = 0.0;
  auto put = [&](std::int64_t flat, double coeff) {
    if (grid.is_boundary(flat)) {
      row.data.emplace_back(flat, coeff);
    } else {
      row.unknowns.emplace_back(flat, coeff);
    }
  };
  for (int i = 0; i < grid.dim(); ++i) {
    const double h = grid.spacing(i);
    const double inv4h2 = 1.0 / (4.0 * h * h);
    const std::int64_t s = grid.stride(i);
    const int a = idx[i];
    if (a == 2) {
      if (bc == BoundaryRule::LinearExtension) {
        diag += 3.0 * inv4h2;
        put(f + 2 * s, -inv4h2);
        row.data.emplace_back(f - s, -2.0 * inv4h2);
      } else {
        diag += 5.0 * inv4h2;
        put(f + s, -inv4h2);
        put(f + 2 * s, -inv4h2);
        row.data.emplace_back(f - s, -3.0 * inv4h2);
      }
    } else if (a == grid.count(i) - 1) {
      if (bc == BoundaryRule::LinearExtension) {
        diag += 3.0 * inv4h2;
        put(f - 2 * s, -inv4h2);
        row.data.emplace_back(f + s, -2.0 * inv4h2);
      } else {
        diag += 5.0 * inv4h2;
        put(f - s, -inv4h2);
        put(f - 2 * s, -inv4h2);
        row.data.emplace_back(f + s, -3.0 * inv4h2);
      }
    } else {
      diag += 2.0 * inv4h2;
      put(f + 2 * s, -inv4h2);
      put(f - 2 * s, -inv4h2);
    }
  }
  row.unknowns.emplace_back(f, diag);
  return row;
}

double extrapolation_L(const GridFunction& v, const MultiIndex& idx, int axis, int sign,
                       const DirichletData& g, BoundaryRule bc) {
  const Grid& grid = v.grid();
  const std::int64_t f = grid.flat(idx);
  if (grid.is_boundary(f)) {
    throw std::logic_error("extrapolation_L: index must be an interior node");
  }
  const std::int64_t s = (sign > 0 ? +1 : -1) * grid.stride(axis);
  const int a = idx[axis];
  const bool shell_adjacent = (sign > 0) ? (a == grid.count(axis) - 1) : (a == 2);
  if (!shell_adjacent) {
    return 2.0 * read(v, g, grid, f + s) - read(v, g, grid, f + 2 * s);
  }
  // a +/- e_i is the shell boundary node, a +/- 2 e_i the eliminated ghost.
  const double gb = g[f + s];
  const double u = v[f];
  if (bc == BoundaryRule::LinearExtension) {
    return u;  // ghost = 2 g - u
  }
  return 3.0 * u - read(v, g, grid, f - s) - gb;  // ghost = 3 g - 3 u + V_{a -/+ e_i}
}

ClampResult clamp_L(double value, std::int64_t flat, const CutoffBounds& bounds) {
  ClampResult r{value, false};
  const double lo = bounds.lower[flat];
  const double hi = bounds.upper[flat];
  if (value > hi) {
    r.value = hi;
    r.clamped = true;
  } else if (value < lo) {
    r.value = lo;
    r.clamped = true;
  }
  return r;
}

}  // namespace hjfd
