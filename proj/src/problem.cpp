#include "hjfd/problem.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace hjfd {

namespace {

inline double sgn(double t) { return (t > 0.0) - (t < 0.0); }

Problem problem_1d_ex1() {
  Problem p;
  p.name = "1d-ex1";
  p.box = DomainBox({-1.0}, {1.0});
  auto u = [](double x) { return x * x * x + std::cos(4.0 * x); };
  auto ux = [](double x) { return 3.0 * x * x - 4.0 * std::sin(4.0 * x); };
  auto f = [=](double x) {
    return (3.0 * x * x - x + 4.0) * ux(x) + (x * x + 1.0) * u(x);
  };
  p.hamiltonian = [=](std::span<const double> q, double uu, std::span<const double> x) {
    return (3.0 * x[0] * x[0] - x[0] + 4.0) * q[0] + (x[0] * x[0] + 1.0) * uu - f(x[0]);
  };
  p.exact = [=](std::span<const double> x) { return u(x[0]); };
  p.exact_gradient = [=](std::span<const double> x, std::span<double> g) { g[0] = ux(x[0]); };
  p.dirichlet = p.exact;
  p.lip_q = {8.0};  // sup |3x^2 - x + 4| on [-1, 1]
  p.lip_u = 2.0;    // sup (x^2 + 1)
  p.theta_min = 1.0;
  return p;
}

Problem problem_1d_ex2() {
  Problem p;
  p.name = "1d-ex2";
  p.box = DomainBox({-1.0}, {1.0});
  // Exact solution 1 - |x|; the matching forcing is |u_x| + u = 2 - |x|.
  auto f = [](double x) { return 2.0 - std::abs(x); };
  p.hamiltonian = [=](std::span<const double> q, double uu, std::span<const double> x) {
    return std::abs(q[0]) + uu - f(x[0]);
  };
  p.exact = [](std::span<const double> x) { return 1.0 - std::abs(x[0]); };
  p.exact_gradient = [](std::span<const double> x, std::span<double> g) { g[0] = -sgn(x[0]); };
  p.dirichlet = p.exact;
  p.lip_q = {1.0};
  p.lip_u = 1.0;
  p.theta_min = 1.0;
  p.kink_distance = [](std::span<const double> x) { return std::abs(x[0]); };
  return p;
}

Problem problem_2d_ex1() {
  Problem p;
  p.name = "2d-ex1";
  p.box = DomainBox({-1.0, -1.0}, {1.0, 1.0});
  auto u = [](double x, double y) { return std::exp(x * y); };
  auto f = [=](double x, double y) { return (y + x + 1.0) * u(x, y); };
  p.hamiltonian = [=](std::span<const double> q, double uu, std::span<const double> x) {
    return q[0] + q[1] + uu - f(x[0], x[1]);
  };
  p.exact = [=](std::span<const double> x) { return u(x[0], x[1]); };
  p.exact_gradient = [=](std::span<const double> x, std::span<double> g) {
    const double e = u(x[0], x[1]);
    g[0] = x[1] * e;
    g[1] = x[0] * e;
  };
  p.dirichlet = p.exact;
  p.lip_q = {1.0, 1.0};
  p.lip_u = 1.0;
  p.theta_min = 1.0;
  return p;
}

Problem problem_2d_ex2() {
  Problem p;
  p.name = "2d-ex2";
  p.box = DomainBox({-1.0, -1.0}, {1.0, 1.0});
  auto u = [](double x, double y) { return std::exp(x * y); };
  auto f = [=](double x, double y) { return u(x, y) * (std::hypot(x, y) + 1.0); };
  p.hamiltonian = [=](std::span<const double> q, double uu, std::span<const double> x) {
    return std::hypot(q[0], q[1]) + uu - f(x[0], x[1]);
  };
  p.exact = [=](std::span<const double> x) { return u(x[0], x[1]); };
  p.exact_gradient = [=](std::span<const double> x, std::span<double> g) {
    const double e = u(x[0], x[1]);
    g[0] = x[1] * e;
    g[1] = x[0] * e;
  };
  p.dirichlet = p.exact;
  p.lip_q = {1.0, 1.0};
  p.lip_u = 1.0;
  p.theta_min = 1.0;
  return p;
}

Problem problem_2d_ex3() {
  Problem p;
  p.name = "2d-ex3";
  p.box = DomainBox({-1.0, -1.0}, {1.0, 1.0});
  const double pi = 3.14159265358979323846;
  auto u = [=](double x, double y) { return std::cos(pi * x) * std::cos(pi * y) - 0.5; };
  auto ux = [=](double x, double y) { return -pi * std::sin(pi * x) * std::cos(pi * y); };
  auto uy = [=](double x, double y) { return -pi * std::cos(pi * x) * std::sin(pi * y); };
  auto f = [=](double x, double y) {
    const double uu = u(x, y);
    return std::abs(ux(x, y)) + std::abs(uy(x, y)) + std::abs(uu) + 2.0 * uu;
  };
  p.hamiltonian = [=](std::span<const double> q, double uu, std::span<const double> x) {
    return std::abs(q[0]) + std::abs(q[1]) + std::abs(uu) + 2.0 * uu - f(x[0], x[1]);
  };
  p.exact = [=](std::span<const double> x) { return u(x[0], x[1]); };
  p.exact_gradient = [=](std::span<const double> x, std::span<double> g) {
    g[0] = ux(x[0], x[1]);
    g[1] = uy(x[0], x[1]);
  };
  p.dirichlet = p.exact;
  p.lip_q = {1.0, 1.0};
  p.lip_u = 3.0;  // sup (sgn(u) + 2)
  p.theta_min = 1.0;
  return p;
}

Problem problem_2d_ex4() {
  Problem p;
  p.name = "2d-ex4";
  p.box = DomainBox({-1.0, -1.0}, {1.0, 1.0});
  auto f = [](double x) { return 1.0 + 2.0 * sgn(x - 0.2) + std::abs(x - 0.2); };
  p.hamiltonian = [=](std::span<const double> q, double uu, std::span<const double> x) {
    return std::abs(q[0]) + 2.0 * q[0] + uu - f(x[0]);
  };
  p.exact = [](std::span<const double> x) { return std::abs(x[0] - 0.2); };
  p.exact_gradient = [](std::span<const double> x, std::span<double> g) {
    g[0] = sgn(x[0] - 0.2);
    g[1] = 0.0;
  };
  p.dirichlet = p.exact;
  p.lip_q = {3.0, 0.0};
  p.lip_u = 1.0;
  p.theta_min = 1.0;
  p.kink_distance = [](std::span<const double> x) { return std::abs(x[0] - 0.2); };
  return p;
}

}  // namespace

Problem registry(const std::string& name) {
  if (name == "1d-ex1") return problem_1d_ex1();
  if (name == "1d-ex2") return problem_1d_ex2();
  if (name == "2d-ex1") return problem_2d_ex1();
  if (name == "2d-ex2") return problem_2d_ex2();
  if (name == "2d-ex3") return problem_2d_ex3();
  if (name == "2d-ex4") return problem_2d_ex4();
  throw std::invalid_argument("registry: unknown problem '" + name + "'");
}

std::vector<std::string> registry_names() {
  return {"1d-ex1", "1d-ex2", "2d-ex1", "2d-ex2", "2d-ex3", "2d-ex4"};
}

double verify_manufactured(const Problem& p, int samples, std::uint64_t seed,
                           double kink_exclusion) {
  if (!p.has_exact() || !p.exact_gradient) {
    throw std::invalid_argument("verify_manufactured: problem lacks an exact solution");
  }
  std::mt19937_64 rng(seed);
  const int d = p.dim();
  std::vector<std::uniform_real_distribution<double>> dist;
  dist.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) dist.emplace_back(p.box.lower(i), p.box.upper(i));

  std::vector<double> x(static_cast<std::size_t>(d));
  std::vector<double> grad(static_cast<std::size_t>(d));
  double worst = 0.0;
  int accepted = 0;
  while (accepted < samples) {
    for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] = dist[static_cast<std::size_t>(i)](rng);
    if (p.kink_distance && p.kink_distance(x) < kink_exclusion) continue;
    ++accepted;
    p.exact_gradient(x, grad);
    const double defect = p.hamiltonian(grad, p.exact(x), x);
    worst = std::max(worst, std::abs(defect));
  }
  return worst;
}

}  // namespace hjfd
