#include "helpers.hpp"

#include "spreadlab/discrepancy.hpp"
#include "spreadlab/laczkovich.hpp"
#include "spreadlab/suite.hpp"

#include <doctest.h>

#include <cmath>

using namespace spreadlab;
using testutil::line;

namespace {

AtomicMeasure left() { return line({0, 2}, 2); }
AtomicMeasure right() { return line({1, 3}, 2); }

// Independent oracle: smallest candidate radius at which every subset of
// either side is dominated, by direct enumeration with check_di_condition.
Radius enumerate_di(const AtomicMeasure& a, const AtomicMeasure& b) {
  std::vector<Radius> candidates{Radius::from_real(Real(0))};
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      candidates.push_back(Radius::from_squared(squared_distance(a.domain(), a.position(i), b.position(j))));
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Radius& x, const Radius& y) { return *x.squared < *y.squared; });
  for (const Radius& r : candidates) {
    bool ok = true;
    for (int side = 1; side <= 2 && ok; ++side) {
      const std::size_t n = side == 1 ? a.size() : b.size();
      for (std::uint32_t mask = 1; mask < (1u << n) && ok; ++mask) {
        std::vector<std::uint32_t> c;
        for (std::uint32_t i = 0; i < n; ++i) {
          if (mask & (1u << i)) c.push_back(i);
        }
        ok = check_di_condition(a, b, r, side, c).holds;
      }
    }
    if (ok) return r;
  }
  FAIL("no candidate radius works");
  return {};
}

}  // namespace

TEST_CASE("discrepancy_distance: identical measures give 0 and no certificate") {
  const AtomicMeasure a = line({1, 5, 6}, 4);
  const DiscrepancyResult r = discrepancy_distance(a, a);
  CHECK(r.value.value == 0.0);
  CHECK_FALSE(r.certificate_below.has_value());
}

TEST_CASE("discrepancy_distance: {0,1} vs {1/2,3/2} is 1/2 with an isolated certificate") {
  // Subset-enumeration oracle just below 1/2: C = {0} has no neighbour.
  const std::vector<std::uint32_t> zero{0};
  const Radius below = Radius::from_real(Real::exact(49, 100));
  CHECK_FALSE(check_di_condition(left(), right(), below, 1, zero).holds);
  for (auto method : {DiscrepancyMethod::kSubsetEnumeration, DiscrepancyMethod::kCutCertificate}) {
    const DiscrepancyResult r = discrepancy_distance(left(), right(), method);
    CHECK(same_radius(r.value, Radius::from_real(Real::exact(1, 2))));
    REQUIRE(r.certificate_below.has_value());
    const ViolatingSet& v = *r.certificate_below;
    CHECK_FALSE(v.atoms.empty());
    CHECK(v.neighborhood_mass == Real(0));
    // Replay: the certificate must fail at its own radius.
    CHECK_FALSE(check_di_condition(left(), right(), *v.radius, v.side, v.atoms).holds);
  }
}

TEST_CASE("discrepancy_distance: single atoms") {
  const Domain d = Domain::torus(3, Real(10));
  const AtomicMeasure x = testutil::point(d, {Real(1), Real(2), Real(3)});
  const AtomicMeasure y = testutil::point(d, {Real(3), Real(4), Real(4)});
  CHECK(same_radius(discrepancy_distance(x, y).value, Radius::from_real(Real(3))));
}

TEST_CASE("check_di_condition: empty set and huge radius always hold") {
  const auto [a, b] = random_unit_pair(2, 6, 17);
  CHECK(check_di_condition(a, b, Radius::from_real(Real(0)), 1, {}).holds);
  CHECK(check_di_condition(a, b, Radius::from_real(Real(0)), 2, {}).holds);
  const Real diam(100);
  std::vector<std::uint32_t> all{0, 1, 2, 3, 4, 5};
  CHECK(check_di_condition(a, b, Radius::from_real(diam), 1, all).holds);
  CHECK(check_di_condition(a, b, Radius::from_real(diam), 2, all).holds);
}

TEST_CASE("discrepancy_distance: enumeration, cuts and the subset oracle agree") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const int d = 1 + static_cast<int>(s % 3);
    const auto [a, b] = random_unit_pair(d, 2 + static_cast<int>(s % 5), instance_seed(3, s));
    const Radius oracle = enumerate_di(a, b);
    const DiscrepancyResult e = discrepancy_distance(a, b, DiscrepancyMethod::kSubsetEnumeration);
    const DiscrepancyResult c = discrepancy_distance(a, b, DiscrepancyMethod::kCutCertificate);
    CHECK(same_radius(e.value, oracle));
    CHECK(same_radius(c.value, oracle));
    CHECK(same_radius(discrepancy_distance(b, a).value, oracle));
    for (const auto* r : {&e, &c}) {
      if (r->certificate_below) {
        const ViolatingSet& v = *r->certificate_below;
        CHECK_FALSE(check_di_condition(a, b, *v.radius, v.side, v.atoms).holds);
      }
    }
  }
}

TEST_CASE("duality_check: gap is exactly zero on small instances") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto [a, b] = random_unit_pair(2, 4 + static_cast<int>(s % 5), instance_seed(5, s));
    const DualityReport r = duality_check(a, b);
    CHECK(r.exact);
    CHECK(r.agree);
    CHECK(r.gap == 0.0);
  }
  const Domain d = Domain::box(2, Real(8));
  const DualityReport r = duality_check(testutil::point(d, {Real(0), Real(0)}), testutil::point(d, {Real(3), Real(4)}));
  CHECK(r.tra.value == 5.0);
  CHECK(r.di.value == 5.0);
}

TEST_CASE("duality_check: complete relation is feasible on both sides") {
  const auto [a, b] = random_unit_pair(2, 6, 23);
  const auto r = duality_check(a, b, Relation::explicit_matrix(6, 6, std::vector<bool>(36, true)));
  CHECK(r.tra_feasible);
  CHECK(r.di_feasible);
}

TEST_CASE("duality_check: explicit relation with a Hall violation") {
  // Source atoms 0 and 1 may only go to target 0.
  const auto [a, b] = random_unit_pair(1, 3, 29);
  std::vector<bool> m{true, false, false, true, false, false, false, true, true};
  const auto r = duality_check(a, b, Relation::explicit_matrix(3, 3, m));
  CHECK_FALSE(r.tra_feasible);
  CHECK_FALSE(r.di_feasible);
  REQUIRE(r.violation.has_value());
  CHECK(r.violation->set_mass > r.violation->neighborhood_mass);
}

TEST_CASE("discrepancy_vs_lebesgue: the atomization itself has discrepancy 0") {
  const Domain d = Domain::torus(2, Real(2));
  const AtomicMeasure m = lebesgue_atoms(d, Real::exact(1, 4));
  CHECK(discrepancy_vs_lebesgue(m, Real::exact(1, 4)).value == 0.0);
}

TEST_CASE("discrepancy_vs_lebesgue: integer points on the 1D torus give 1/2 within h/2") {
  const AtomicMeasure z = line({0, 1, 2, 3, 4, 5, 6, 7}, 1, Real(8), true);
  const Real h = Real::exact(1, 8);
  const LebesgueDiscrepancy r = discrepancy_vs_lebesgue(z, h);
  CHECK(r.slack == doctest::Approx(1.0 / 16).epsilon(1e-15));
  CHECK(r.value >= 0.5 - 1.0 / 16);
  CHECK(r.value <= 0.5 + 1.0 / 16);
}

TEST_CASE("discrepancy_vs_lebesgue: perturbed lattice with delta 0.2") {
  InstanceParams p;
  p.dimension = 1;
  p.side = Real(8);
  p.delta = 0.2;
  p.denominator = 1024;
  const AtomicMeasure nu = generate_instance(p, 4);
  const LebesgueDiscrepancy r = discrepancy_vs_lebesgue(nu, Real::exact(1, 8));
  // In 1D every point sits in a unit cell [n - 1/2, n + 1/2] and is at most
  // 1/2 + delta from every point of it.
  CHECK(r.value <= 0.5 + 0.2 + r.slack);
}

TEST_CASE("discrepancy_vs_lebesgue: mass imbalance is rejected") {
  const AtomicMeasure z = line({0, 1, 2}, 1, Real(8), true);
  CHECK_THROWS_AS(discrepancy_vs_lebesgue(z, Real::exact(1, 8)), std::invalid_argument);
}
