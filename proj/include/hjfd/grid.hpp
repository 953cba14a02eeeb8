#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace hjfd {

inline constexpr int kMaxDim = 4;

/// Axis-aligned box (a_1,b_1) x ... x (a_d,b_d).
class DomainBox {
 public:
  DomainBox(std::vector<double> lower, std::vector<double> upper);

  int dim() const { return static_cast<int>(lower_.size()); }
  double lower(int axis) const { return lower_[axis]; }
  double upper(int axis) const { return upper_[axis]; }

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

/// 1-based per-axis node index, alpha_i in [1, J_i].
class MultiIndex {
 public:
  MultiIndex() = default;
  MultiIndex(std::initializer_list<int> parts);
  explicit MultiIndex(std::span<const int> parts);

  int dim() const { return dim_; }
  int operator[](int axis) const { return comp_[axis]; }
  int& operator[](int axis) { return comp_[axis]; }
  bool operator==(const MultiIndex&) const = default;

 private:
  std::array<int, kMaxDim> comp_{1, 1, 1, 1};
  int dim_ = 0;
};

enum class NodeKind { Boundary, Ring, DeepInterior };

/// Classification of one node.  Boundary nodes that admit the auxiliary
/// boundary condition along axis i (non-corner face nodes) report that axis
/// and the inward direction; everything else has shell_axis = -1.
struct NodeClass {
  NodeKind kind = NodeKind::Boundary;
  int shell_axis = -1;
  int shell_sign = 0;  // +1: interior neighbor at +e_i, -1: at -e_i
};

/// Result of shifting a multi-index along one axis.  Targets past the
/// boundary are ghost/outside nodes, reported by distance, not an error.
struct ShiftResult {
  bool inside = false;
  MultiIndex index;  // valid only when inside
  int beyond = 0;    // steps past the nearest boundary node when outside
};

struct GhostEntry {
  std::int64_t boundary_flat = -1;
  int axis = -1;
  int inward_sign = 0;                // direction of the interior neighbor
  std::array<double, kMaxDim> ghost_coords{};  // one step outward of the box
};

struct GhostSet {
  std::vector<GhostEntry> entries;
};

/// Uniform tensor-product grid over a box.  Nodes are addressed either by a
/// MultiIndex or by the row-major flat index with axis 1 fastest.
class Grid {
 public:
  Grid(DomainBox box, std::vector<int> counts);

  int dim() const { return dim_; }
  const DomainBox& domain() const { return box_; }
  int count(int axis) const { return counts_[axis]; }
  double spacing(int axis) const { return spacing_[axis]; }
  double hmax() const { return hmax_; }
  std::int64_t num_nodes() const { return total_; }
  std::int64_t stride(int axis) const { return stride_[axis]; }

  std::int64_t flat(const MultiIndex& idx) const;
  MultiIndex unflat(std::int64_t flat) const;
  /// alpha_i (1-based) of a flat index along one axis.
  int component(std::int64_t flat, int axis) const;

  void coords(std::int64_t flat, std::span<double> out) const;
  std::vector<double> coords(const MultiIndex& idx) const;

  NodeClass classify(std::int64_t flat) const;
  NodeClass classify(const MultiIndex& idx) const;
  bool is_boundary(std::int64_t flat) const;

  ShiftResult shift(const MultiIndex& idx, int axis, int steps) const;

  GhostSet ghost_set() const;
  std::vector<std::int64_t> interior_flats() const;

 private:
  void check_range(const MultiIndex& idx) const;

  DomainBox box_;
  std::array<int, kMaxDim> counts_{};
  std::array<double, kMaxDim> spacing_{};
  std::array<std::int64_t, kMaxDim> stride_{};
  double hmax_ = 0.0;
  std::int64_t total_ = 0;
  int dim_ = 0;
};

std::shared_ptr<const Grid> make_grid(const DomainBox& box, std::vector<int> counts);
std::shared_ptr<const Grid> make_grid(std::vector<double> lower, std::vector<double> upper,
                                      std::vector<int> counts);

/// One real value per node of the grid.  Ghost values are never stored.
class GridFunction {
 public:
  explicit GridFunction(std::shared_ptr<const Grid> grid, double value = 0.0);

  const Grid& grid() const { return *grid_; }
  const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }
  std::int64_t size() const { return static_cast<std::int64_t>(values_.size()); }
  double operator[](std::int64_t i) const { return values_[static_cast<std::size_t>(i)]; }
  double& operator[](std::int64_t i) { return values_[static_cast<std::size_t>(i)]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

 private:
  std::shared_ptr<const Grid> grid_;
  std::vector<double> values_;
};

using SpatialFn = std::function<double(std::span<const double>)>;

GridFunction sample(const std::shared_ptr<const Grid>& grid, const SpatialFn& f);

double linf_diff(const GridFunction& a, const GridFunction& b);
/// Max-norm difference over T_h intersect Omega only.
double interior_linf_diff(const GridFunction& a, const GridFunction& b);

}  // namespace hjfd
