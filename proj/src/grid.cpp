#include "hjfd/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hjfd {

DomainBox::DomainBox(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty() || lower_.size() != upper_.size()) {
    throw std::invalid_argument("DomainBox: lower/upper must be nonempty and of equal length");
  }
  if (lower_.size() > static_cast<std::size_t>(kMaxDim)) {
    throw std::invalid_argument("DomainBox: at most " + std::to_string(kMaxDim) +
                                " axes are supported");
  }
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (!(lower_[i] < upper_[i])) {
      throw std::invalid_argument("DomainBox: requires a_i < b_i on every axis");
    }
  }
}

MultiIndex::MultiIndex(std::initializer_list<int> parts) : MultiIndex(std::span<const int>(parts)) {}

MultiIndex::MultiIndex(std::span<const int> parts) {
  if (parts.empty() || parts.size() > static_cast<std::size_t>(kMaxDim)) {
    throw std::invalid_argument("MultiIndex: dimension must be in [1, 4]");
  }
  dim_ = static_cast<int>(parts.size());
  for (int i = 0; i < dim_; ++i) comp_[i] = parts[i];
}

Grid::Grid(DomainBox box, std::vector<int> counts) : box_(std::move(box)), dim_(box_.dim()) {
  if (static_cast<int>(counts.size()) != dim_) {
    throw std::invalid_argument("Grid: one node count per axis required");
  }
  total_ = 1;
  for (int i = 0; i < dim_; ++i) {
    if (counts[i] < 5) {
      throw std::invalid_argument("Grid: J_i >= 5 required so the staggered stencil fits");
    }
    counts_[i] = counts[i];
    spacing_[i] = (box_.upper(i) - box_.lower(i)) / static_cast<double>(counts[i] - 1);
    stride_[i] = total_;
    total_ *= counts[i];
  }
  hmax_ = *std::max_element(spacing_.begin(), spacing_.begin() + dim_);
}

void Grid::check_range(const MultiIndex& idx) const {
  if (idx.dim() != dim_) throw std::out_of_range("Grid: index dimension mismatch");
  for (int i = 0; i < dim_; ++i) {
    if (idx[i] < 1 || idx[i] > counts_[i]) throw std::out_of_range("Grid: index out of range");
  }
}

std::int64_t Grid::flat(const MultiIndex& idx) const {
  check_range(idx);
  std::int64_t f = 0;
  for (int i = 0; i < dim_; ++i) f += static_cast<std::int64_t>(idx[i] - 1) * stride_[i];
  return f;
}

MultiIndex Grid::unflat(std::int64_t flat) const {
  if (flat < 0 || flat >= total_) throw std::out_of_range("Grid: flat index out of range");
  std::array<int, kMaxDim> parts{};
  for (int i = 0; i < dim_; ++i) {
    parts[i] = static_cast<int>((flat / stride_[i]) % counts_[i]) + 1;
  }
  return MultiIndex(std::span<const int>(parts.data(), static_cast<std::size_t>(dim_)));
}

int Grid::component(std::int64_t flat, int axis) const {
  return static_cast<int>((flat / stride_[axis]) % counts_[axis]) + 1;
}

void Grid::coords(std::int64_t flat, std::span<double> out) const {
  for (int i = 0; i < dim_; ++i) {
    out[i] = box_.lower(i) + static_cast<double>(component(flat, i) - 1) * spacing_[i];
  }
}

std::vector<double> Grid::coords(const MultiIndex& idx) const {
  check_range(idx);
  std::vector<double> x(static_cast<std::size_t>(dim_));
  for (int i = 0; i < dim_; ++i) {
    x[static_cast<std::size_t>(i)] = box_.lower(i) + static_cast<double>(idx[i] - 1) * spacing_[i];
  }
  return x;
}

bool Grid::is_boundary(std::int64_t flat) const {
  for (int i = 0; i < dim_; ++i) {
    const int a = component(flat, i);
    if (a == 1 || a == counts_[i]) return true;
  }
  return false;
}

NodeClass Grid::classify(std::int64_t flat) const {
  if (flat < 0 || flat >= total_) throw std::out_of_range("Grid: flat index out of range");
  int extreme_axis = -1;
  int extreme_count = 0;
  int extreme_sign = 0;
  bool ring = false;
  for (int i = 0; i < dim_; ++i) {
    const int a = component(flat, i);
    if (a == 1 || a == counts_[i]) {
      ++extreme_count;
      extreme_axis = i;
      extreme_sign = (a == 1) ? +1 : -1;
    } else if (a == 2 || a == counts_[i] - 1) {
      ring = true;
    }
  }
  NodeClass nc;
  if (extreme_count > 0) {
    nc.kind = NodeKind::Boundary;
    // S_{h_i} is nonempty for at most one axis; corners belong to none.
    if (extreme_count == 1) {
      nc.shell_axis = extreme_axis;
      nc.shell_sign = extreme_sign;
    }
  } else if (ring) {
    nc.kind = NodeKind::Ring;
  } else {
    nc.kind = NodeKind::DeepInterior;
  }
  return nc;
}

NodeClass Grid::classify(const MultiIndex& idx) const { return classify(flat(idx)); }

ShiftResult Grid::shift(const MultiIndex& idx, int axis, int steps) const {
  check_range(idx);
  if (axis < 0 || axis >= dim_) throw std::out_of_range("Grid: axis out of range");
  ShiftResult r;
  const int target = idx[axis] + steps;
  if (target >= 1 && target <= counts_[axis]) {
    r.inside = true;
    r.index = idx;
    r.index[axis] = target;
  } else {
    r.inside = false;
    r.beyond = (target < 1) ? 1 - target : target - counts_[axis];
  }
  return r;
}

GhostSet Grid::ghost_set() const {
  GhostSet gs;
  for (std::int64_t f = 0; f < total_; ++f) {
    const NodeClass nc = classify(f);
    if (nc.kind != NodeKind::Boundary || nc.shell_axis < 0) continue;
    GhostEntry e;
    e.boundary_flat = f;
    e.axis = nc.shell_axis;
    e.inward_sign = nc.shell_sign;
    std::array<double, kMaxDim> x{};
    coords(f, std::span<double>(x.data(), static_cast<std::size_t>(dim_)));
    e.ghost_coords = x;
    e.ghost_coords[e.axis] -= static_cast<double>(e.inward_sign) * spacing_[e.axis];
    gs.entries.push_back(e);
  }
  return gs;
}

std::vector<std::int64_t> Grid::interior_flats() const {
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(total_));
  for (std::int64_t f = 0; f < total_; ++f) {
    if (!is_boundary(f)) out.push_back(f);
  }
  return out;
}

std::shared_ptr<const Grid> make_grid(const DomainBox& box, std::vector<int> counts) {
  return std::make_shared<const Grid>(box, std::move(counts));
}

std::shared_ptr<const Grid> make_grid(std::vector<double> lower, std::vector<double> upper,
                                      std::vector<int> counts) {
  return std::make_shared<const Grid>(DomainBox(std::move(lower), std::move(upper)),
                                      std::move(counts));
}

GridFunction::GridFunction(std::shared_ptr<const Grid> grid, double value)
    : grid_(std::move(grid)) {
  if (!grid_) throw std::invalid_argument("GridFunction: null grid");
  values_.assign(static_cast<std::size_t>(grid_->num_nodes()), value);
}

GridFunction sample(const std::shared_ptr<const Grid>& grid, const SpatialFn& f) {
  GridFunction v(grid);
  std::array<double, kMaxDim> x{};
  const std::span<double> xs(x.data(), static_cast<std::size_t>(grid->dim()));
  for (std::int64_t i = 0; i < grid->num_nodes(); ++i) {
    grid->coords(i, xs);
    v[i] = f(xs);
  }
  return v;
}

double linf_diff(const GridFunction& a, const GridFunction& b) {
  if (a.size() != b.size()) throw std::invalid_argument("linf_diff: size mismatch");
  double m = 0.0;
  for (std::int64_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double interior_linf_diff(const GridFunction& a, const GridFunction& b) {
  if (a.size() != b.size()) throw std::invalid_argument("interior_linf_diff: size mismatch");
  const Grid& g = a.grid();
  double m = 0.0;
  for (std::int64_t i = 0; i < a.size(); ++i) {
    if (!g.is_boundary(i)) m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

}  // namespace hjfd
