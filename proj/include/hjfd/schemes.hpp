#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "hjfd/operators.hpp"
#include "hjfd/problem.hpp"

namespace hjfd {

enum class SchemeKind { LaxFriedrichs, HighOrder, Modified };

struct SchemeConfig {
  double beta = 0.0;   // coefficient of the h^2-scaled viscosity
  double gamma = 0.0;  // moment / viscosity strength, must be > 0
  double p = 1.0;      // moment scaling exponent, in [0, 1]
  BoundaryRule bc = BoundaryRule::LinearExtension;
  double cutoff_c = 10.0;  // band radius multiplier for the modified scheme
};

/// Experiment defaults: 10 in one dimension, 5 otherwise.
double default_gamma(int dim);

/// Per-grid residual assembly for one scheme.  Values at boundary nodes are
/// always read from the Dirichlet data, so residuals are functions of the
/// interior values only.
class SchemeEvaluator {
 public:
  SchemeEvaluator(const Problem& problem, std::shared_ptr<const Grid> grid, SchemeConfig config,
                  SchemeKind kind, const CutoffBounds* bounds = nullptr);

  double residual_at(const GridFunction& v, std::int64_t flat) const;
  /// Residuals at every interior node, in interior() order.
  void residual_interior(const GridFunction& v, std::span<double> out) const;
  double residual_linf(const GridFunction& v) const;

  struct Activation {
    std::int64_t flat = -1;
    int axis = -1;
    int sign = 0;
    double value = 0.0;  // unclamped extrapolation value
  };
  /// True when any cutoff operator clamps at v (Modified scheme only).
  bool cutoff_active(const GridFunction& v, std::vector<Activation>* list = nullptr) const;

  /// Branch of one cutoff operator, used to freeze the piecewise structure
  /// during a solve.
  enum class ClampBranch : std::uint8_t { Free, AtLower, AtUpper };
  /// Branch selection at v, 2*dim() entries per interior node in interior()
  /// order (axis-major, + sign before - sign).
  void select_branches(const GridFunction& v, std::vector<ClampBranch>& out) const;
  /// Residuals with the clamp branches frozen; equals residual_interior when
  /// `branches` is the live selection at v.
  void residual_interior_frozen(const GridFunction& v, std::span<const ClampBranch> branches,
                                std::span<double> out) const;

  const Grid& grid() const { return *grid_; }
  const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }
  const Problem& problem() const { return problem_; }
  const SchemeConfig& config() const { return config_; }
  SchemeKind kind() const { return kind_; }
  const CutoffBounds* bounds() const { return bounds_; }
  std::span<const std::int64_t> interior() const { return interior_; }
  double boundary_value(std::int64_t flat) const { return gvals_[flat]; }

 private:
  double moment_at(const GridFunction& v, std::int64_t flat, double u) const;
  double extrap_at(const GridFunction& v, std::int64_t flat, double u, int axis, int sign) const;
  inline double read(const GridFunction& v, std::int64_t flat) const {
    return boundary_[static_cast<std::size_t>(flat)] ? gvals_[flat] : v[flat];
  }

  Problem problem_;
  std::shared_ptr<const Grid> grid_;
  SchemeConfig config_;
  SchemeKind kind_;
  const CutoffBounds* bounds_ = nullptr;

  DirichletData gvals_;
  std::vector<std::uint8_t> boundary_;
  std::vector<std::uint8_t> ring_lo_;  // bit i: alpha_i == 2
  std::vector<std::uint8_t> ring_hi_;  // bit i: alpha_i == J_i - 1
  std::vector<double> coords_;
  std::vector<std::int64_t> interior_;
  double hp_ = 0.0;       // h^p
  double beta_h2_ = 0.0;  // beta * h^2
};

/// H_LF[V] at one node: H_h - (gamma/2) h^p Laplacian.
double residual_lf(const Problem& p, const SchemeConfig& cfg, const GridFunction& v,
                   const MultiIndex& idx);
/// H_h[V] + gamma h^p (staggered - plain Laplacian) at one node.
double residual_ho(const Problem& p, const SchemeConfig& cfg, const GridFunction& v,
                   const MultiIndex& idx);
/// The cutoff-modified residual at one node; reports clamp activity.
double residual_modified(const Problem& p, const SchemeConfig& cfg, const CutoffBounds& bounds,
                         const GridFunction& v, const MultiIndex& idx, bool* clamped = nullptr);

/// Band u_lf +/- c * h at every node.
CutoffBounds build_band(const GridFunction& u_lf, double c);

struct CutoffReport {
  bool active = false;
  std::vector<SchemeEvaluator::Activation> activations;
};

CutoffReport cutoff_report(const SchemeEvaluator& eval, const GridFunction& v);

/// Sampled estimate of the gamma needed for the Lax-Friedrichs part to be
/// monotone on the working band.
struct GammaCheck {
  double required = 0.0;
  bool sufficient = true;
};

GammaCheck check_gamma(const Problem& p, const SchemeConfig& cfg, const Grid& grid);

}  // namespace hjfd
