#include "helpers.hpp"

#include "spreadlab/laczkovich.hpp"

#include <doctest.h>

#include <cmath>

using namespace spreadlab;

namespace {

CubeUnion cubes(int d, std::int64_t edge, std::initializer_list<Anchor> anchors) {
  CubeUnion u;
  u.dimension = d;
  u.edge = edge;
  for (const auto& a : anchors) u.cubes.insert(a);
  return u;
}

}  // namespace

TEST_CASE("boundary_area: single cube, two adjacent cubes, empty union") {
  CHECK(boundary_area(cubes(2, 5, {{0, 0, 0}})) == 20);
  CHECK(boundary_area(cubes(2, 1, {{0, 0, 0}, {1, 0, 0}})) == 6);
  CHECK(boundary_area(cubes(2, 3, {})) == 0);
  CHECK(boundary_area(cubes(3, 2, {{0, 0, 0}})) == 24);
}

TEST_CASE("boundary_area: translation invariance and subadditivity") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const CubeUnion u = random_cube_union(2 + static_cast<int>(s % 2), 6, instance_seed(13, s));
    CubeUnion shifted = u;
    shifted.cubes.clear();
    for (const auto& a : u.cubes) shifted.cubes.insert({a[0] + 7, a[1] - 3, a[2] + (u.dimension == 3 ? 11 : 0)});
    CHECK(boundary_area(shifted) == boundary_area(u));
    CubeUnion far = u;
    far.cubes.clear();
    for (const auto& a : u.cubes) far.cubes.insert({a[0] + 100, a[1], a[2]});
    CubeUnion both = u;
    both.cubes.insert(far.cubes.begin(), far.cubes.end());
    CHECK(boundary_area(both) <= boundary_area(u) + boundary_area(far));
  }
}

TEST_CASE("build_ab: interior point, corner point, empty set") {
  PointBoxSet v;
  v.dimension = 2;
  v.denominator = 2;
  v.add_point({5, 5, 0});  // (2.5, 2.5)
  CubeCover c = build_ab(v, 5);
  CHECK(c.a.count() == 1);
  CHECK(c.b.count() == 9);

  PointBoxSet corner;
  corner.dimension = 2;
  corner.add_point({5, 5, 0});  // the shared corner of four 5-cubes
  c = build_ab(corner, 5);
  CHECK(c.a.count() == 4);
  CHECK(c.b.count() == 16);

  PointBoxSet empty;
  empty.dimension = 2;
  c = build_ab(empty, 5);
  CHECK(c.a.count() == 0);
  CHECK(c.b.count() == 0);
}

TEST_CASE("claim_check: interior point with M = 5 evaluates to 20, 60 and 160") {
  PointBoxSet v;
  v.dimension = 2;
  v.denominator = 2;
  v.add_point({5, 5, 0});
  const ClaimReport r = claim_check(v, 5);
  CHECK(r.lhs_a == 20);
  CHECK(r.lhs_b == 60);
  CHECK(r.rhs == 160);
  CHECK(r.pass);

  PointBoxSet empty;
  empty.dimension = 3;
  const ClaimReport e = claim_check(empty, 3);
  CHECK(e.lhs_a == 0);
  CHECK(e.rhs == 0);
  CHECK(e.pass);
}

TEST_CASE("build_ab: A inside B, B minus A large, monotone in V") {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const int d = 2 + static_cast<int>(s % 2);
    const std::int64_t m = 3 + 2 * static_cast<std::int64_t>(s % 3);
    const PointBoxSet v = random_point_box_set(d, m, instance_seed(17, s));
    const CubeCover c = build_ab(v, m);
    for (const auto& a : c.a.cubes) CHECK(c.b.contains(a));
    if (c.a.count() > 0) CHECK(c.b.count() > c.a.count());
    PointBoxSet bigger = v;
    const PointBoxSet extra = random_point_box_set(d, m, instance_seed(19, s));
    bigger.boxes.insert(bigger.boxes.end(), extra.boxes.begin(), extra.boxes.end());
    const CubeCover cb = build_ab(bigger, m);
    for (const auto& a : c.a.cubes) CHECK(cb.a.contains(a));
    for (const auto& b : c.b.cubes) CHECK(cb.b.contains(b));
  }
}

TEST_CASE("claim_batch: serial and parallel agree with zero failures") {
  const ClaimBatch s = claim_batch_serial(2, 5, 3, 200);
  const ClaimBatch p = claim_batch_omp(2, 5, 3, 200);
  CHECK(s.failures == 0);
  CHECK(p.failures == 0);
  CHECK(s.count == 200);
  CHECK(p.count == 200);
}

TEST_CASE("rho_upper_bound: exact grid measure, one extra atom, degenerate union") {
  const Domain d = Domain::torus(2, Real(8));
  const AtomicMeasure grid = lebesgue_atoms(d, Real(1));
  std::vector<CubeUnion> family;
  for (std::uint64_t s = 0; s < 20; ++s) family.push_back(random_cube_union(2, 8, instance_seed(1, s)));
  const RhoEstimate e = rho_upper_bound(grid, family);
  CHECK(e.raw == 0.0);
  CHECK(e.rho_hat == 1.0);

  // One extra atom deep inside a 6x6 block: ratio 1 / 24.
  std::vector<Real> coords(grid.coordinates().begin(), grid.coordinates().end());
  std::vector<Real> masses(grid.masses().begin(), grid.masses().end());
  coords.push_back(Real::exact(7, 2));
  coords.push_back(Real::exact(7, 2));
  masses.emplace_back(1);
  const AtomicMeasure plus(d, coords, masses);
  CubeUnion block;
  block.dimension = 2;
  for (std::int64_t i = 1; i < 7; ++i) {
    for (std::int64_t j = 1; j < 7; ++j) block.cubes.insert({i, j, 0});
  }
  const RhoEstimate one = rho_upper_bound(plus, {block});
  CHECK(one.raw == doctest::Approx(1.0 / 24).epsilon(1e-15));
  CHECK(one.rho_hat == 1.0);
  CHECK_THROWS_AS(rho_upper_bound(grid, {CubeUnion{}}), std::invalid_argument);
}

TEST_CASE("rho_upper_bound: sampled value stays below the analytic bound for perturbed lattices") {
  for (double delta : {0.1, 0.2, 0.4}) {
    InstanceParams p;
    p.dimension = 2;
    p.side = Real(8);
    p.delta = delta;
    p.denominator = 1024;
    const AtomicMeasure nu = generate_instance(p, 21);
    std::vector<CubeUnion> family;
    for (std::uint64_t s = 0; s < 100; ++s) family.push_back(random_cube_union(2, 8, instance_seed(2, s)));
    CHECK(rho_upper_bound(nu, family).raw <= rho_analytic_perturbed_lattice(2, delta));
  }
}

TEST_CASE("laczkovich_pipeline: rho = 1 in 2D gives M = 5 and bound 9 * 2^1.5") {
  CHECK(laczkovich_edge(1.0, 2) == 5);
  CHECK(laczkovich_constant(2) == doctest::Approx(9.0 * std::pow(2.0, 1.5)).epsilon(1e-15));
  const AtomicMeasure grid = lebesgue_atoms(Domain::torus(2, Real(8)), Real(1));
  const PipelineResult r = laczkovich_pipeline(grid, 1.0, 20);
  CHECK(r.edge == 5);
  CHECK(r.bound == doctest::Approx(25.455844122715714).epsilon(1e-12));
  CHECK(r.chain_holds);
  CHECK_THROWS_AS(laczkovich_pipeline(grid, 0.5), std::invalid_argument);
}

TEST_CASE("replay_chain: every step holds on perturbed lattices") {
  InstanceParams p;
  p.dimension = 2;
  p.side = Real(16);
  p.delta = 0.3;
  p.denominator = 1024;
  const AtomicMeasure nu = generate_instance(p, 9);
  const double rho = rho_analytic_perturbed_lattice(2, 0.3);
  const PipelineResult r = laczkovich_pipeline(nu, rho, 50, 4);
  CHECK(r.replays.size() == 50);
  for (const ChainReplay& c : r.replays) {
    CHECK(c.a_nu_v_le_nu_a);
    CHECK(c.b_hypothesis_on_a);
    CHECK(c.c_claim_upper);
    CHECK(c.d_b_inside_neighbourhood);
    CHECK(c.e_hypothesis_on_b);
    CHECK(c.f_claim_lower);
    CHECK(c.upper_holds);
    CHECK(c.lower_holds);
  }
}
