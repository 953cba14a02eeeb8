#include <doctest.h>

#include <cmath>
#include <set>

#include "hjfd/grid.hpp"

using namespace hjfd;

TEST_CASE("grid spacing follows h = (b - a) / (J - 1)") {
  const auto g = make_grid({-1.0}, {1.0}, {100});
  CHECK(g->hmax() == doctest::Approx(2.0 / 99.0).epsilon(1e-14));
  CHECK(g->hmax() == doctest::Approx(2.02e-2).epsilon(1e-3));

  const auto g5 = make_grid({0.0}, {1.0}, {5});
  CHECK(g5->hmax() == 0.25);
  for (int a = 1; a <= 5; ++a) {
    const auto x = g5->coords(MultiIndex{a});
    CHECK(x[0] == doctest::Approx(0.25 * (a - 1)).epsilon(1e-15));
  }

  const auto g2 = make_grid({-1.0, -1.0}, {1.0, 1.0}, {8, 8});
  CHECK(g2->spacing(0) == doctest::Approx(2.0 / 7.0).epsilon(1e-14));
  CHECK(g2->spacing(1) == doctest::Approx(2.0 / 7.0).epsilon(1e-14));
  CHECK(g2->num_nodes() == 64);
}

TEST_CASE("grid construction rejects bad input") {
  CHECK_THROWS_AS(make_grid({-1.0}, {1.0}, {4}), std::invalid_argument);
  CHECK_THROWS_AS(make_grid({1.0}, {-1.0}, {10}), std::invalid_argument);
  CHECK_THROWS_AS(make_grid({0.0, 0.0}, {1.0, 1.0}, {10}), std::invalid_argument);
}

TEST_CASE("node classification") {
  const auto g = make_grid({-1.0}, {1.0}, {10});
  const NodeClass left = g->classify(MultiIndex{1});
  CHECK(left.kind == NodeKind::Boundary);
  CHECK(left.shell_axis == 0);
  CHECK(left.shell_sign == +1);
  CHECK(g->classify(MultiIndex{2}).kind == NodeKind::Ring);
  CHECK(g->classify(MultiIndex{9}).kind == NodeKind::Ring);
  CHECK(g->classify(MultiIndex{5}).kind == NodeKind::DeepInterior);

  const auto g2 = make_grid({-1.0, -1.0}, {1.0, 1.0}, {8, 8});
  const NodeClass corner = g2->classify(MultiIndex{1, 1});
  CHECK(corner.kind == NodeKind::Boundary);
  CHECK(corner.shell_axis == -1);  // corners belong to no shell set
  const NodeClass face = g2->classify(MultiIndex{1, 4});
  CHECK(face.shell_axis == 0);
  CHECK(g2->classify(MultiIndex{2, 2}).kind == NodeKind::Ring);
  CHECK(g2->classify(MultiIndex{4, 4}).kind == NodeKind::DeepInterior);

  CHECK_THROWS_AS(g->classify(MultiIndex{11}), std::out_of_range);
}

TEST_CASE("coordinates are exact at the boundary") {
  const auto g = make_grid({-1.0}, {1.0}, {5});
  CHECK(g->coords(MultiIndex{3})[0] == 0.0);
  CHECK(g->coords(MultiIndex{1})[0] == -1.0);
  CHECK(g->coords(MultiIndex{5})[0] == 1.0);

  const auto g2 = make_grid({-1.0, -1.0}, {1.0, 1.0}, {5, 5});
  const auto xy = g2->coords(MultiIndex{5, 1});
  CHECK(xy[0] == 1.0);
  CHECK(xy[1] == -1.0);
}

TEST_CASE("shift returns ghost markers instead of errors") {
  const auto g = make_grid({-1.0}, {1.0}, {10});
  const ShiftResult ghost = g->shift(MultiIndex{2}, 0, -2);
  CHECK(!ghost.inside);
  CHECK(ghost.beyond == 1);
  const ShiftResult ok = g->shift(MultiIndex{5}, 0, +2);
  CHECK(ok.inside);
  CHECK(ok.index == MultiIndex{7});

  const auto g2 = make_grid({-1.0, -1.0}, {1.0, 1.0}, {8, 8});
  const ShiftResult up = g2->shift(MultiIndex{4, 8}, 1, +1);
  CHECK(!up.inside);
  CHECK(up.beyond == 1);
}

TEST_CASE("classes partition the grid and deep interior has J - 4 nodes in 1D") {
  for (const int j : {5, 10, 23}) {
    const auto g = make_grid({-1.0}, {1.0}, {j});
    int boundary = 0, ring = 0, deep = 0;
    for (std::int64_t f = 0; f < g->num_nodes(); ++f) {
      switch (g->classify(f).kind) {
        case NodeKind::Boundary: ++boundary; break;
        case NodeKind::Ring: ++ring; break;
        case NodeKind::DeepInterior: ++deep; break;
      }
    }
    CHECK(boundary + ring + deep == j);
    CHECK(deep == j - 4);
    CHECK(boundary == 2);
  }
  const auto g2 = make_grid({0.0, 0.0}, {1.0, 2.0}, {6, 9});
  int boundary = 0, ring = 0, deep = 0;
  for (std::int64_t f = 0; f < g2->num_nodes(); ++f) {
    switch (g2->classify(f).kind) {
      case NodeKind::Boundary: ++boundary; break;
      case NodeKind::Ring: ++ring; break;
      case NodeKind::DeepInterior: ++deep; break;
    }
  }
  CHECK(boundary + ring + deep == g2->num_nodes());
  CHECK(deep == (6 - 4) * (9 - 4));
}

TEST_CASE("flat and multi index are a bijection") {
  const auto g = make_grid({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, {5, 6, 7});
  std::set<std::int64_t> seen;
  for (std::int64_t f = 0; f < g->num_nodes(); ++f) {
    const MultiIndex idx = g->unflat(f);
    CHECK(g->flat(idx) == f);
    seen.insert(f);
  }
  CHECK(static_cast<std::int64_t>(seen.size()) == g->num_nodes());
}

TEST_CASE("ghost markers arise only one step out from the ring or boundary") {
  const auto g = make_grid({-1.0}, {1.0}, {10});
  for (std::int64_t f = 0; f < g->num_nodes(); ++f) {
    const MultiIndex idx = g->unflat(f);
    const NodeKind kind = g->classify(f).kind;
    for (const int step : {-2, -1, 1, 2}) {
      const ShiftResult r = g->shift(idx, 0, step);
      if (!r.inside) {
        const bool ring_two_out = kind == NodeKind::Ring && std::abs(step) == 2;
        const bool boundary_out = kind == NodeKind::Boundary;
        CHECK((ring_two_out || boundary_out));
      }
    }
  }
}

TEST_CASE("ghost set lies outside the box by exactly one spacing") {
  const auto g = make_grid({-1.0, -1.0}, {1.0, 1.0}, {8, 6});
  const GhostSet gs = g->ghost_set();
  CHECK(gs.entries.size() == 2u * 4u + 2u * 6u);  // non-corner face nodes
  std::set<std::int64_t> flats;
  for (const auto& e : gs.entries) {
    CHECK(!flats.count(e.boundary_flat));  // at most one axis per node
    flats.insert(e.boundary_flat);
    const double out = e.ghost_coords[static_cast<std::size_t>(e.axis)];
    const double lo = g->domain().lower(e.axis);
    const double hi = g->domain().upper(e.axis);
    const double h = g->spacing(e.axis);
    const bool below = std::abs(out - (lo - h)) < 1e-14;
    const bool above = std::abs(out - (hi + h)) < 1e-14;
    CHECK((below || above));
  }
}

TEST_CASE("grid function sampling and norms") {
  const auto g = make_grid({-1.0}, {1.0}, {9});
  GridFunction v = sample(g, [](std::span<const double> x) { return x[0] * x[0]; });
  CHECK(v.size() == 9);
  CHECK(v[g->flat(MultiIndex{5})] == 0.0);
  GridFunction w = v;
  w[g->flat(MultiIndex{1})] += 3.0;  // boundary node
  w[g->flat(MultiIndex{5})] += 1.0;
  CHECK(linf_diff(v, w) == 3.0);
  CHECK(interior_linf_diff(v, w) == 1.0);
}
