#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hjfd/grid.hpp"

namespace hjfd {

/// Auxiliary boundary condition closing the staggered stencil at the ring:
/// LinearExtension forces the second difference at the shell node to vanish,
/// QuadraticExtension forces it to match the adjacent interior node.
enum class BoundaryRule { LinearExtension, QuadraticExtension };

/// Dirichlet data g sampled once at the boundary nodes of a grid.
class DirichletData {
 public:
  DirichletData(const std::shared_ptr<const Grid>& grid, const SpatialFn& g);

  const Grid& grid() const { return *grid_; }
  /// Valid at boundary flats; zero elsewhere.
  double operator[](std::int64_t flat) const { return values_[static_cast<std::size_t>(flat)]; }

 private:
  std::shared_ptr<const Grid> grid_;
  std::vector<double> values_;
};

/// Band [lower, upper] used by the cutoff operators.
struct CutoffBounds {
  GridFunction lower;
  GridFunction upper;

  void validate() const;  // lower <= upper at every node
};

struct ClampResult {
  double value = 0.0;
  bool clamped = false;
};

/// Forward (+1) or backward (-1) first difference.  The referenced neighbor
/// must exist on the grid.
double diff_sided(const GridFunction& v, int axis, int sign, const MultiIndex& idx);

/// Central gradient, component i = (V_{a+e_i} - V_{a-e_i}) / (2 h_i).
std::vector<double> gradient_central(const GridFunction& v, const MultiIndex& idx);

/// Sum over axes of the central second difference.
double laplacian_h(const GridFunction& v, const MultiIndex& idx);

/// The numerical-moment difference (staggered minus plain Laplacian) with
/// ghost values eliminated through the chosen boundary rule.  idx must be an
/// interior node; values at boundary neighbors are read from g.
double moment(const GridFunction& v, const MultiIndex& idx, const DirichletData& g,
              BoundaryRule bc);

/// One assembled row of the minus staggered Laplacian after ghost elimination.
/// `unknowns` holds coefficients on interior nodes, `data` coefficients on
/// boundary nodes (multiplying the Dirichlet value there).
struct SparseRow {
  std::vector<std::pair<std::int64_t, double>> unknowns;
  std::vector<std::pair<std::int64_t, double>> data;
};

SparseRow staggered_laplacian_row(const Grid& grid, const MultiIndex& idx, BoundaryRule bc);

/// L_i^{+/-} V = 2 V_{a +/- e_i} - V_{a +/- 2 e_i}, with ghost values
/// substituted from the boundary rule and boundary neighbors read from g.
double extrapolation_L(const GridFunction& v, const MultiIndex& idx, int axis, int sign,
                       const DirichletData& g, BoundaryRule bc);

/// Clamp a value into [lower_a, upper_a] at one node; the closed band keeps
/// values equal to either bound unclamped.
ClampResult clamp_L(double value, std::int64_t flat, const CutoffBounds& bounds);

}  // namespace hjfd
