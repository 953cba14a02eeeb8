#include <doctest.h>

#include <cmath>
#include <random>

#include "hjfd/schemes.hpp"

using namespace hjfd;

namespace {

// Linear advection-reaction problem with a chosen exact solution, so the
// residuals can be probed against known kernels.
Problem linear_problem(int dim, const SpatialFn& exact, const GradientFn& grad) {
  Problem p;
  p.name = "test-linear";
  p.box = dim == 1 ? DomainBox({-1.0}, {1.0}) : DomainBox({-1.0, -1.0}, {1.0, 1.0});
  p.exact = exact;
  p.exact_gradient = grad;
  p.dirichlet = exact;
  p.hamiltonian = [=](std::span<const double> q, double u, std::span<const double> x) {
    double acc = u;
    for (std::size_t i = 0; i < q.size(); ++i) acc += q[i];
    std::vector<double> g(q.size());
    grad(x, g);
    double forcing = exact(x);
    for (std::size_t i = 0; i < q.size(); ++i) forcing += g[i];
    return acc - forcing;
  };
  p.lip_q.assign(static_cast<std::size_t>(dim), 1.0);
  p.lip_u = 1.0;
  p.theta_min = 1.0;
  return p;
}

SchemeConfig config_1d() {
  SchemeConfig cfg;
  cfg.gamma = 10.0;
  return cfg;
}

GridFunction random_in_band(const CutoffBounds& bounds, std::mt19937_64& rng) {
  GridFunction v = bounds.lower;
  std::uniform_real_distribution<double> t(0.0, 1.0);
  for (std::int64_t i = 0; i < v.size(); ++i) {
    v[i] = bounds.lower[i] + t(rng) * (bounds.upper[i] - bounds.lower[i]);
  }
  return v;
}

}  // namespace

TEST_CASE("default gamma follows the experiments") {
  CHECK(default_gamma(1) == 10.0);
  CHECK(default_gamma(2) == 5.0);
}

TEST_CASE("config validation") {
  const auto g = make_grid({-1.0}, {1.0}, {10});
  const Problem p = linear_problem(
      1, [](std::span<const double> x) { return x[0]; },
      [](std::span<const double>, std::span<double> out) { out[0] = 1.0; });
  SchemeConfig bad = config_1d();
  bad.p = 1.5;
  CHECK_THROWS_AS(SchemeEvaluator(p, g, bad, SchemeKind::LaxFriedrichs), std::invalid_argument);
  bad = config_1d();
  bad.gamma = 0.0;
  CHECK_THROWS_AS(SchemeEvaluator(p, g, bad, SchemeKind::LaxFriedrichs), std::invalid_argument);
  CHECK_THROWS_AS(SchemeEvaluator(p, g, config_1d(), SchemeKind::Modified), std::invalid_argument);
}

TEST_CASE("Lax-Friedrichs residual vanishes on an exact linear solution") {
  const Problem p = linear_problem(
      1, [](std::span<const double> x) { return x[0]; },
      [](std::span<const double>, std::span<double> out) { out[0] = 1.0; });
  const auto g = make_grid({-1.0}, {1.0}, {17});
  const GridFunction v = sample(g, p.exact);
  for (const std::int64_t f : g->interior_flats()) {
    CHECK(std::abs(residual_lf(p, config_1d(), v, g->unflat(f))) <= 1e-12);
  }
}

TEST_CASE("numerical viscosity vanishes on constants") {
  Problem p = linear_problem(
      1, [](std::span<const double> x) { return x[0]; },
      [](std::span<const double>, std::span<double> out) { out[0] = 1.0; });
  const double c = 2.75;
  p.dirichlet = [=](std::span<const double>) { return c; };  // data matches V
  const auto g = make_grid({-1.0}, {1.0}, {12});
  const GridFunction v(g, c);
  std::array<double, 1> q0{0.0};
  for (const std::int64_t f : g->interior_flats()) {
    double x;
    g->coords(f, std::span<double>(&x, 1));
    // residual reduces to H(0, c, x): the viscosity term is zero on constants
    const double expect = p.hamiltonian(q0, c, std::span<const double>(&x, 1));
    CHECK(residual_lf(p, config_1d(), v, g->unflat(f)) ==
          doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("high-order residual is exact for quadratics with the quadratic extension") {
  const SpatialFn exact = [](std::span<const double> x) {
    return 0.7 * x[0] * x[0] - 1.3 * x[0] * x[1] + 0.4 * x[1] * x[1] + 0.5 * x[0] - 0.2;
  };
  const GradientFn grad = [](std::span<const double> x, std::span<double> out) {
    out[0] = 1.4 * x[0] - 1.3 * x[1] + 0.5;
    out[1] = -1.3 * x[0] + 0.8 * x[1];
  };
  const Problem p = linear_problem(2, exact, grad);
  SchemeConfig cfg;
  cfg.gamma = 5.0;
  cfg.bc = BoundaryRule::QuadraticExtension;
  const auto g = make_grid({-1.0, -1.0}, {1.0, 1.0}, {9, 9});
  const GridFunction v = sample(g, exact);
  for (const std::int64_t f : g->interior_flats()) {
    CHECK(std::abs(residual_ho(p, cfg, v, g->unflat(f))) <= 1e-11);
  }
}

TEST_CASE("high-order residual is exact for linear solutions under either extension") {
  const SpatialFn exact = [](std::span<const double> x) { return 2.0 * x[0] - 0.6; };
  const GradientFn grad = [](std::span<const double>, std::span<double> out) { out[0] = 2.0; };
  const Problem p = linear_problem(1, exact, grad);
  const auto g = make_grid({-1.0}, {1.0}, {13});
  const GridFunction v = sample(g, exact);
  for (const BoundaryRule bc : {BoundaryRule::LinearExtension, BoundaryRule::QuadraticExtension}) {
    SchemeConfig cfg = config_1d();
    cfg.bc = bc;
    for (const std::int64_t f : g->interior_flats()) {
      CHECK(std::abs(residual_ho(p, cfg, v, g->unflat(f))) <= 1e-12);
    }
  }
}

TEST_CASE("modified residual equals the high-order residual when nothing clamps") {
  const Problem p = registry("1d-ex1");
  const auto g = make_grid({-1.0}, {1.0}, {16});
  std::mt19937_64 rng(2222u);
  std::uniform_real_distribution<double> val(-1.5, 1.5);
  GridFunction v(g);
  for (std::int64_t i = 0; i < v.size(); ++i) v[i] = val(rng);
  // A band wide enough that no extrapolation leaves it.
  CutoffBounds wide{GridFunction(g, -100.0), GridFunction(g, 100.0)};
  for (const BoundaryRule bc : {BoundaryRule::LinearExtension, BoundaryRule::QuadraticExtension}) {
    SchemeConfig cfg = config_1d();
    cfg.bc = bc;
    for (const std::int64_t f : g->interior_flats()) {
      bool clamped = true;
      const double mod = residual_modified(p, cfg, wide, v, g->unflat(f), &clamped);
      const double ho = residual_ho(p, cfg, v, g->unflat(f));
      CHECK(!clamped);
      CHECK(mod == doctest::Approx(ho).epsilon(1e-13));
    }
  }
}

TEST_CASE("degenerate band reduces the modified residual to Lax-Friedrichs") {
  const Problem p = registry("1d-ex1");
  const auto g = make_grid({-1.0}, {1.0}, {14});
  std::mt19937_64 rng(333u);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  GridFunction v(g);
  for (std::int64_t i = 0; i < v.size(); ++i) v[i] = val(rng);
  const CutoffBounds degenerate{v, v};  // upper = lower = v
  const SchemeConfig cfg = config_1d();
  for (const std::int64_t f : g->interior_flats()) {
    const double mod = residual_modified(p, cfg, degenerate, v, g->unflat(f));
    const double lf = residual_lf(p, cfg, v, g->unflat(f));
    CHECK(mod == doctest::Approx(lf).epsilon(1e-12));
  }
}

TEST_CASE("build_band") {
  const auto g = make_grid({-1.0}, {1.0}, {5});  // h = 0.5
  GridFunction u(g, 0.0);
  const CutoffBounds b = build_band(u, 1.0);
  for (std::int64_t i = 0; i < u.size(); ++i) {
    CHECK(b.upper[i] == doctest::Approx(0.5));
    CHECK(b.lower[i] == doctest::Approx(-0.5));
    CHECK(b.lower[i] < u[i]);
    CHECK(u[i] < b.upper[i]);
  }
  const auto g2 = make_grid({0.0}, {1.0}, {101});  // h = 0.01
  GridFunction w(g2, 2.0);
  const CutoffBounds b2 = build_band(w, 10.0);
  CHECK(b2.upper[0] - w[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK_THROWS_AS(build_band(u, 0.0), std::invalid_argument);
}

TEST_CASE("cutoff report flags activity only when clamps fire") {
  const Problem p = registry("1d-ex1");
  const auto g = make_grid({-1.0}, {1.0}, {20});
  const GridFunction v = sample(g, p.exact);
  const SchemeConfig cfg = config_1d();

  const CutoffBounds wide = build_band(v, 1000.0);
  SchemeEvaluator eval_wide(p, g, cfg, SchemeKind::Modified, &wide);
  CHECK(!cutoff_report(eval_wide, v).active);

  // A band much tighter than the solution's curvature must clamp somewhere.
  const CutoffBounds tight = build_band(v, 1e-4);
  SchemeEvaluator eval_tight(p, g, cfg, SchemeKind::Modified, &tight);
  const CutoffReport report = cutoff_report(eval_tight, v);
  CHECK(report.active);
  CHECK(!report.activations.empty());
}

TEST_CASE("frozen-branch residual agrees with the live one at the selection point") {
  const Problem p = registry("1d-ex2");
  const auto g = make_grid({-1.0}, {1.0}, {24});
  const GridFunction center = sample(g, p.exact);
  const CutoffBounds band = build_band(center, 0.05);
  SchemeEvaluator eval(p, g, config_1d(), SchemeKind::Modified, &band);
  std::mt19937_64 rng(11u);
  GridFunction v = random_in_band(band, rng);
  std::vector<SchemeEvaluator::ClampBranch> branches;
  eval.select_branches(v, branches);
  std::vector<double> live(eval.interior().size()), frozen(eval.interior().size());
  eval.residual_interior(v, live);
  eval.residual_interior_frozen(v, branches, frozen);
  for (std::size_t k = 0; k < live.size(); ++k) {
    CHECK(frozen[k] == doctest::Approx(live[k]).epsilon(1e-14));
  }
}

TEST_CASE("evaluator matches the one-shot residual wrappers") {
  const Problem p = registry("2d-ex2");
  const auto g = make_grid({-1.0, -1.0}, {1.0, 1.0}, {7, 8});
  std::mt19937_64 rng(55u);
  std::uniform_real_distribution<double> val(-1.0, 2.0);
  GridFunction v(g);
  for (std::int64_t i = 0; i < v.size(); ++i) v[i] = val(rng);
  SchemeConfig cfg;
  cfg.gamma = 5.0;
  cfg.bc = BoundaryRule::QuadraticExtension;
  SchemeEvaluator lf(p, g, cfg, SchemeKind::LaxFriedrichs);
  SchemeEvaluator ho(p, g, cfg, SchemeKind::HighOrder);
  for (const std::int64_t f : g->interior_flats()) {
    CHECK(lf.residual_at(v, f) ==
          doctest::Approx(residual_lf(p, cfg, v, g->unflat(f))).epsilon(1e-13));
    CHECK(ho.residual_at(v, f) ==
          doctest::Approx(residual_ho(p, cfg, v, g->unflat(f))).epsilon(1e-13));
  }
}

TEST_CASE("monotonicity certificate for the Lax-Friedrichs residual") {
  // With beta = 0, p = 1 and gamma >= sup |dH/dq|, every interior residual is
  // nonincreasing in each off-center stencil value and nondecreasing in the
  // center, checked by perturbing every entry on random states in a band.
  struct Setup {
    const char* problem;
    std::shared_ptr<const Grid> grid;
    int trials;
  };
  const Setup setups[] = {
      {"1d-ex1", make_grid({-1.0}, {1.0}, {15}), 50},   // lip_q = 8 <= gamma = 10
      {"2d-ex2", make_grid({-1.0, -1.0}, {1.0, 1.0}, {7, 7}), 10},  // lip_q = 1 <= 5
  };
  std::mt19937_64 rng(4242u);
  const double eps = 1e-6;
  for (const Setup& setup : setups) {
    const Problem p = registry(setup.problem);
    const auto& g = setup.grid;
    SchemeConfig cfg;
    cfg.gamma = default_gamma(p.dim());
    SchemeEvaluator eval(p, g, cfg, SchemeKind::LaxFriedrichs);
    const GridFunction exact = sample(g, p.exact);
    const CutoffBounds band = build_band(exact, 20.0);
    for (int trial = 0; trial < setup.trials; ++trial) {
      GridFunction v = random_in_band(band, rng);
      for (const std::int64_t f : g->interior_flats()) {
        const double base = eval.residual_at(v, f);
        const MultiIndex idx = g->unflat(f);
        for (int axis = 0; axis < g->dim(); ++axis) {
          for (const int step : {-1, 1}) {
            const ShiftResult n = g->shift(idx, axis, step);
            if (!n.inside || g->is_boundary(g->flat(n.index))) continue;
            GridFunction w = v;
            w[g->flat(n.index)] += eps;
            CHECK(eval.residual_at(w, f) <= base + 1e-12);
          }
        }
        GridFunction w = v;
        w[f] += eps;
        CHECK(eval.residual_at(w, f) >= base - 1e-12);
      }
    }
  }
}

TEST_CASE("gamma sufficiency estimate") {
  const Problem p = registry("1d-ex1");
  const auto g = make_grid({-1.0}, {1.0}, {20});
  SchemeConfig cfg = config_1d();
  CHECK(check_gamma(p, cfg, *g).sufficient);  // gamma = 10 >= sup|H_q| = 8
  cfg.gamma = 2.0;
  const GammaCheck low = check_gamma(p, cfg, *g);
  CHECK(!low.sufficient);
  CHECK(low.required > 2.0);
  CHECK(low.required <= 8.5);
}
