#include "helpers.hpp"

#include "spreadlab/grid.hpp"
#include "spreadlab/io.hpp"
#include "spreadlab/measure.hpp"

#include <doctest.h>

#include <cmath>

using namespace spreadlab;

TEST_CASE("real: exact rationals and parsing") {
  CHECK(Real::parse("3/4") == Real::exact(3, 4));
  CHECK(Real::parse("0.125") == Real::exact(1, 8));
  CHECK(Real::parse("-2") == Real(-2));
  CHECK(Real::exact(1, 3).is_exact());
  CHECK(Real::exact(1, 3) + Real::exact(2, 3) == Real(1));
  CHECK(floor_to_int(Real::exact(-1, 2)) == -1);
  CHECK_THROWS(Real::parse("1/0"));
  CHECK_THROWS(Real::parse("abc"));
}

TEST_CASE("scale_measure: unit mass at 2 on [0,4) scaled by 2 lands at 1 on [0,2)") {
  const Domain d = Domain::torus(1, Real(4));
  const AtomicMeasure nu = testutil::point(d, {Real(2)});
  const AtomicMeasure s = scale_measure(nu, Real(2));
  CHECK(s.position(0)[0] == Real(1));
  CHECK(s.domain().side == Real(2));
  CHECK(s.mass(0) == Real(1));
}

TEST_CASE("scale_measure: identity, inverse and group action are exact") {
  InstanceParams p;
  p.dimension = 2;
  p.side = Real(4);
  p.delta = 0.3;
  p.denominator = 64;
  const AtomicMeasure nu = generate_instance(p, 11);
  const auto same = [](const AtomicMeasure& a, const AtomicMeasure& b) {
    if (a.size() != b.size() || !(a.domain() == b.domain())) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!(a.mass(i) == b.mass(i))) return false;
      for (int k = 0; k < a.dimension(); ++k) {
        if (!(a.position(i)[k] == b.position(i)[k])) return false;
      }
    }
    return true;
  };
  CHECK(same(scale_measure(nu, Real(1)), nu));
  CHECK(same(scale_measure(scale_measure(nu, Real(3)), Real::exact(1, 3)), nu));
  CHECK(same(scale_measure(scale_measure(nu, Real(2)), Real(3)), scale_measure(nu, Real(6))));
  CHECK_THROWS_AS(scale_measure(nu, Real(0)), std::invalid_argument);
  CHECK_THROWS_AS(scale_measure(nu, Real(-1)), std::invalid_argument);
}

TEST_CASE("scale_measure: Lebesgue-normalized masses keep the density") {
  const AtomicMeasure nu = lebesgue_atoms(Domain::torus(2, Real(4)), Real(1));
  const AtomicMeasure s = scale_measure(nu, Real(2), MassScaling::kLebesgue);
  CHECK(s.total_mass() == Real(4));  // volume of [0,2)^2
}

TEST_CASE("generate_instance: contracts") {
  InstanceParams p;
  p.dimension = 2;
  p.side = Real(5);
  p.delta = 0.0;
  SUBCASE("delta 0 gives the lattice with unit masses") {
    const AtomicMeasure nu = generate_instance(p, 3);
    REQUIRE(nu.size() == 25);
    for (std::size_t i = 0; i < nu.size(); ++i) {
      CHECK(nu.mass(i) == Real(1));
      for (int k = 0; k < 2; ++k) CHECK(floor_to_int(nu.position(i)[k]) * Real(1) == nu.position(i)[k]);
    }
  }
  SUBCASE("same seed twice is bit-identical") {
    p.delta = 0.4;
    p.kind = InstanceKind::kPoissonProcess;
    const auto a = io::to_json(generate_instance(p, 9)).dump();
    const auto b = io::to_json(generate_instance(p, 9)).dump();
    CHECK(a == b);
    CHECK(a != io::to_json(generate_instance(p, 10)).dump());
  }
  SUBCASE("ball_uniform has total mass 1 inside the unit ball") {
    p.kind = InstanceKind::kBallUniform;
    p.side = Real(8);
    p.center = {4.0, 4.0};
    p.radius = 1.0;
    p.pitch = Real::exact(1, 16);
    const AtomicMeasure nu = generate_instance(p, 1);
    CHECK(std::abs(nu.total_mass().to_double() - 1.0) < 1e-12);
    for (std::size_t i = 0; i < nu.size(); ++i) {
      const auto x = nu.position_approx(i);
      CHECK(std::hypot(x[0] - 4.0, x[1] - 4.0) <= 1.0);
    }
  }
  SUBCASE("invalid parameters name the field") {
    p.delta = 0.5;
    try {
      generate_instance(p, 1);
      FAIL("expected a throw");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("delta") != std::string::npos);
    }
  }
}

TEST_CASE("json: exact measures round-trip bit-exactly") {
  const Domain d = Domain::torus(2, Real(3));
  const AtomicMeasure nu(d, {Real::exact(1, 3), Real::exact(5, 8), Real(2), Real::exact(7, 1024)},
                         {Real::exact(2, 7), Real::exact(19, 7)});
  const AtomicMeasure back = io::measure_from_json(io::json::parse(io::to_json(nu).dump()));
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back.mass(i) == nu.mass(i));
    CHECK(back.mass(i).is_exact());
    for (int k = 0; k < 2; ++k) CHECK(back.position(i)[k] == nu.position(i)[k]);
  }
  CHECK(io::to_json(Real::exact(1, 3)).is_string());
  CHECK(io::to_json(Real::exact(3, 8)).is_number_float());
  CHECK(io::to_json(Real(5)).is_number_integer());
}

TEST_CASE("lebesgue_atoms: cell centres with mass h^d") {
  const AtomicMeasure m = lebesgue_atoms(Domain::torus(2, Real(2)), Real::exact(1, 2));
  CHECK(m.size() == 16);
  CHECK(m.mass(0) == Real::exact(1, 4));
  CHECK(m.total_mass() == Real(4));
  CHECK(m.position(0)[0] == Real::exact(1, 4));
}

TEST_CASE("test functions: closed-form gradient matches finite differences") {
  const auto battery = default_battery(2, 4.0, 20);
  REQUIRE(battery.size() == 20);
  const double eps = 1e-6;
  for (const auto& phi : battery) {
    const std::array<double, 2> x{0.7, 2.3};
    const auto g = phi.gradient(x);
    for (int k = 0; k < 2; ++k) {
      auto xp = x;
      auto xm = x;
      xp[static_cast<std::size_t>(k)] += eps;
      xm[static_cast<std::size_t>(k)] -= eps;
      const double fd = (phi.value(xp) - phi.value(xm)) / (2 * eps);
      CHECK(std::abs(fd - g[static_cast<std::size_t>(k)]) < 1e-6 * (1 + phi.gradient_bound()));
    }
  }
}
