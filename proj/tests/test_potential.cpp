#include "helpers.hpp"

#include "spreadlab/field.hpp"
#include "spreadlab/potential.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace spreadlab;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ScalarGrid smooth_potential(std::uint64_t seed) {
  InstanceParams p;
  p.dimension = 2;
  p.side = Real(8);
  p.delta = 0.3;
  const Lattice l = Lattice::cubic(Domain::torus(2, Real(8)), 64);
  return poisson_connect(mollify(generate_instance(p, seed), l, 1.0)).potential;
}

}  // namespace

TEST_CASE("laplacian: zero and the cosine mode") {
  const Lattice l = Lattice::cubic(Domain::torus(1, Real(8)), 64);
  ScalarGrid u(l);
  for (double m : laplacian(u).cell_mass) CHECK(m == 0.0);
  for (std::size_t i = 0; i < l.size(); ++i) u.values[i] = std::cos(kTwoPi * l.center(i)[0] / 8.0);
  const GridMeasure lap = laplacian(u);
  const double k2 = (kTwoPi / 8.0) * (kTwoPi / 8.0);
  for (std::size_t i = 0; i < l.size(); ++i) CHECK(std::abs(lap.density(i) + k2 * u.values[i]) < 1e-12);
}

TEST_CASE("corollary1_bound: zero potential and sup 4 gives r* = 2") {
  const Lattice l = Lattice::cubic(Domain::torus(2, Real(4)), 16);
  ScalarGrid u(l);
  PotentialBound b = corollary1_bound(u);
  CHECK(b.bound == 0.0);
  u.values[3] = -4.0;
  b = corollary1_bound(u);
  CHECK(b.r_star == 2.0);
  CHECK(b.bound == doctest::Approx((1 + potential_constant(2)) * 2.0).epsilon(1e-15));
}

TEST_CASE("corollary bounds: scaling family gives t^-1") {
  const ScalarGrid u = smooth_potential(3);
  const double b1 = corollary1_bound(u).bound;
  for (int t : {2, 4}) {
    const ScalarGrid ut = scale_potential(u, Real(t));
    CHECK(corollary1_bound(ut).bound == doctest::Approx(b1 / t).epsilon(1e-12));
  }
}

TEST_CASE("corollary2_bound: zero, minimum over samples, below corollary 1, chain") {
  const Lattice l = Lattice::cubic(Domain::torus(2, Real(4)), 16);
  CHECK(corollary2_bound(ScalarGrid(l)).bound == 0.0);
  for (std::uint64_t s = 0; s < 4; ++s) {
    const ScalarGrid u = smooth_potential(s);
    const PotentialBound b2 = corollary2_bound(u);
    const PotentialBound b1 = corollary1_bound(u);
    const double k = 1 + potential_constant(2);
    CHECK(b2.bound <= b1.bound);
    CHECK(b2.chain_holds);
    for (const auto& sample : b2.samples) {
      CHECK(b2.bound <= k * sample.objective * (1 + 1e-15));
      CHECK(sample.sup_triple <= sample.sup_single * (1 + 1e-12));
      CHECK(sample.objective == doctest::Approx(sample.r + std::sqrt(sample.sup_single)).epsilon(1e-15));
    }
  }
}

TEST_CASE("mollifier gradient: discrete ball surface over volume is close to d") {
  for (int d : {1, 2, 3}) {
    const Lattice l = Lattice::cubic(Domain::torus(d, Real(8)), d == 3 ? 64 : 512);
    const MollifierGradient g = mollifier_gradient_l1(l, 2.0);
    CHECK(g.exact == d);
    CHECK(std::abs(g.measured - d) <= 0.1 * d);
  }
}

TEST_CASE("smoothed gradient: sup |grad (u * chi_r)| <= (d / r) sup |u|") {
  for (std::uint64_t s = 0; s < 3; ++s) {
    const ScalarGrid u = smooth_potential(s);
    for (double r : {0.5, 1.0, 2.0}) CHECK(smoothed_gradient_sup(u, r) <= 2.0 / r * u.sup_norm());
  }
}

TEST_CASE("pinned constants") {
  CHECK(transport_upper_constant(2) == doctest::Approx(1 + 9 * std::pow(2.0, 1.5)).epsilon(1e-15));
  CHECK(transport_lower_constant(2) == doctest::Approx(2 + 6.25).epsilon(1e-15));
  CHECK(potential_constant(1) == doctest::Approx(10.0).epsilon(1e-15));
}
