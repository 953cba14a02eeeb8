#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hjfd/grid.hpp"

namespace hjfd {

using HamiltonianFn =
    std::function<double(std::span<const double> q, double u, std::span<const double> x)>;
using GradientFn = std::function<void(std::span<const double> x, std::span<double> grad)>;

/// One stationary Hamilton-Jacobi problem: H(grad u, u, x) = 0 in the box,
/// u = g on its boundary.  Any zeroth-order term is folded into H, which must
/// be nondecreasing in u with margin at least theta_min on the working band.
struct Problem {
  std::string name;
  DomainBox box{{0.0}, {1.0}};
  HamiltonianFn hamiltonian;
  SpatialFn dirichlet;
  SpatialFn exact;            // null when no closed-form solution is known
  GradientFn exact_gradient;  // null when exact is null
  std::vector<double> lip_q;  // per-axis bound on |dH/dq_i| over the band
  double lip_u = 1.0;         // upper bound on dH/du over the band
  double theta_min = 1.0;     // lower bound on dH/du
  SpatialFn kink_distance;    // distance to the nearest kink of exact; null = smooth

  bool has_exact() const { return static_cast<bool>(exact); }
  int dim() const { return box.dim(); }
};

/// Benchmark problems: 1d-ex1, 1d-ex2, 2d-ex1, 2d-ex2, 2d-ex3, 2d-ex4.
Problem registry(const std::string& name);
std::vector<std::string> registry_names();

/// Max |H(grad u_exact, u_exact, x)| over random interior points, skipping
/// points within `kink_exclusion` of a kink of the exact solution.
double verify_manufactured(const Problem& p, int samples, std::uint64_t seed,
                           double kink_exclusion = 1e-6);

}  // namespace hjfd
