#include "helpers.hpp"

#include "spreadlab/field.hpp"
#include "spreadlab/transport.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace spreadlab;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Lattice line_lattice(double side, int n) { return Lattice::cubic(Domain::torus(1, Real::from_number(side)), n); }

Lattice square_lattice(std::int64_t side, int n) { return Lattice::cubic(Domain::torus(2, Real(side)), n); }

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// 1D field eps (L / 2 pi) sin(2 pi x / L) and the density 1 + eps cos(2 pi x / L).
GridField mode_field(const Lattice& l, double eps) {
  GridField v(l);
  for (std::size_t i = 0; i < l.size(); ++i) {
    v.components[0][i] = eps * l.side() / kTwoPi * std::sin(kTwoPi * l.center(i)[0] / l.side());
  }
  return v;
}

GridMeasure mode_density(const Lattice& l, double eps) {
  GridMeasure mu(l);
  for (std::size_t i = 0; i < l.size(); ++i) {
    mu.cell_mass[i] = (1.0 + eps * std::cos(kTwoPi * l.center(i)[0] / l.side())) * l.cell_volume();
  }
  return mu;
}

double torus_distance(const Lattice& l, const std::array<double, 3>& a, std::span<const double> b) {
  double s = 0.0;
  for (int k = 0; k < l.dimension(); ++k) {
    double t = std::abs(a[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)]);
    t = std::min(t, l.side() - t);
    s += t * t;
  }
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("divergence: zero and constant fields") {
  const Lattice l = square_lattice(4, 16);
  GridField v(l);
  CHECK(max_abs(divergence(v).cell_mass) == 0.0);
  std::fill(v.components[0].begin(), v.components[0].end(), 1.5);
  std::fill(v.components[1].begin(), v.components[1].end(), -0.25);
  CHECK(max_abs(divergence(v).cell_mass) < 1e-14);
  CHECK(max_abs(divergence(v, DerivativeScheme::kCentered).cell_mass) < 1e-14);
}

TEST_CASE("divergence: the sine mode has cosine divergence to 1e-12") {
  const Lattice l = line_lattice(8.0, 64);
  const GridMeasure div = divergence(mode_field(l, 1.0));
  for (std::size_t i = 0; i < l.size(); ++i) {
    CHECK(std::abs(div.density(i) - std::cos(kTwoPi * l.center(i)[0] / 8.0)) < 1e-12);
  }
}

TEST_CASE("divergence: sums to zero on the torus") {
  const Lattice l = square_lattice(4, 16);
  GridField v(l);
  std::uint64_t state = 12345;
  for (auto& c : v.components) {
    for (auto& x : c) {
      state = state * 6364136223846793005ULL + 1442695040888963407ULL;
      x = static_cast<double>(state >> 11) / 9007199254740992.0 - 0.5;
    }
  }
  for (auto scheme : {DerivativeScheme::kSpectral, DerivativeScheme::kCentered}) {
    double sum = 0.0;
    for (double m : divergence(v, scheme).cell_mass) sum += m;
    CHECK(std::abs(sum) < 1e-12);
  }
}

TEST_CASE("poisson_connect: uniform measure gives zero potential and field") {
  const Lattice l = square_lattice(4, 16);
  const PoissonSolution s = poisson_connect(GridMeasure::lebesgue(l));
  CHECK(s.potential.sup_norm() < 1e-14);
  CHECK(s.field.sup_norm() < 1e-14);
}

TEST_CASE("poisson_connect: single cosine mode matches the closed form to 1e-10") {
  const Lattice l = line_lattice(16.0, 128);
  const double eps = 0.3;
  const PoissonSolution s = poisson_connect(mode_density(l, eps));
  const GridField expect = mode_field(l, eps);
  for (std::size_t i = 0; i < l.size(); ++i) CHECK(std::abs(s.field.components[0][i] - expect.components[0][i]) < 1e-10);
}

TEST_CASE("poisson_connect: mollified perturbed lattice has weak residual <= 1e-8") {
  InstanceParams p;
  p.dimension = 2;
  p.side = Real(8);
  p.delta = 0.3;
  const AtomicMeasure nu = generate_instance(p, 2);
  const Lattice l = square_lattice(8, 64);
  const GridMeasure mu = mollify(nu, l, 1.0);
  const PoissonSolution s = poisson_connect(mu);
  const auto battery = default_battery(2, 8.0);
  const DivergenceReport rep = weak_divergence_report(s.field, minus_lebesgue(mu), battery);
  CHECK(rep.residuals.size() == 20);
  CHECK(rep.max_residual <= 1e-8);
  // Same answer from the serial kernel.
  CHECK(weak_divergence_report(s.field, minus_lebesgue(mu), battery, Execution::kSerial).max_residual <= 1e-8);
  // Laplacian of the potential recovers nu - m.
  const GridMeasure lap = laplacian(s.potential);
  const GridMeasure target = minus_lebesgue(mu);
  for (std::size_t i = 0; i < l.size(); ++i) CHECK(std::abs(lap.density(i) - target.density(i)) < 1e-8);
}

TEST_CASE("poisson_connect: rejects unbalanced mass") {
  const Lattice l = square_lattice(4, 8);
  GridMeasure mu = GridMeasure::lebesgue(l);
  mu.cell_mass[0] += 1e-3;
  CHECK_THROWS_AS(poisson_connect(mu), std::invalid_argument);
}

TEST_CASE("mollify: delta at the origin becomes the normalized discrete ball") {
  const Lattice l = square_lattice(4, 32);
  GridMeasure delta(l);
  delta.cell_mass[0] = 1.0;
  const double r = 0.5;
  const GridMeasure m = mollify(delta, r);
  const kernels::Stencil ball = ball_stencil(l, r);
  double total = 0.0;
  std::size_t support = 0;
  for (double x : m.cell_mass) {
    total += x;
    if (x > 1e-14) {
      ++support;
      CHECK(x == doctest::Approx(1.0 / static_cast<double>(ball.offsets.size())).epsilon(1e-12));
    }
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(support == ball.offsets.size());
}

TEST_CASE("mollify: twice equals the second convolution power, mass and support") {
  InstanceParams p;
  p.dimension = 2;
  p.side = Real(8);
  p.kind = InstanceKind::kPoissonProcess;
  p.count = 10;
  const AtomicMeasure nu = generate_instance(p, 8);
  const Lattice l = square_lattice(8, 64);
  const double r = 0.75;
  const GridMeasure once = mollify(nu, l, r);
  const GridMeasure twice = mollify(once, r);
  const GridMeasure power2 = mollify(nu, l, r, 2);
  for (std::size_t i = 0; i < l.size(); ++i) CHECK(std::abs(twice.cell_mass[i] - power2.cell_mass[i]) < 1e-12);
  const GridMeasure power3 = mollify(nu, l, r, 3);
  CHECK(std::abs(power3.total() - nu.total_mass().to_double()) <= 1e-10 * nu.total_mass().to_double());
  const double h_half_diag = l.max_pitch() * std::sqrt(2.0) / 2;
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (power3.cell_mass[i] <= 1e-12) continue;
    double nearest = 1e9;
    for (std::size_t a = 0; a < nu.size(); ++a) nearest = std::min(nearest, torus_distance(l, l.center(i), nu.position_approx(a)));
    CHECK(nearest <= 3 * r + h_half_diag + 1e-12);
  }
  CHECK_THROWS_AS(mollify(once, 4.0), std::invalid_argument);
}

TEST_CASE("ra: zero field, constant field, chain and single mode") {
  const Lattice l = line_lattice(16.0, 128);
  GridField v(l);
  CHECK(ra(v).value == 0.0);
  CHECK(ra_tilde(v).value == 0.0);
  std::fill(v.components[0].begin(), v.components[0].end(), -0.7);
  CHECK(ra(v).value == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(ra_tilde(v).value == doctest::Approx(0.7).epsilon(1e-12));

  const double eps = 0.05;
  const GridField m = mode_field(l, eps);
  const RaResult r = ra(m);
  const RaResult rt = ra_tilde(m);
  const double r_min = ra_radii(l).at(1);
  CHECK(r.value <= eps * 16.0 / kTwoPi + r_min);
  CHECK(r.value <= rt.value);
  CHECK(rt.value <= m.sup_norm());
}

TEST_CASE("ra: cancellation in the sign-alternating field") {
  const Lattice l = line_lattice(16.0, 128);
  GridField v(l);
  for (std::size_t i = 0; i < l.size(); ++i) {
    v.components[0][i] = std::sin(kTwoPi * l.center(i)[0] / 16.0) > 0 ? 2.0 : -2.0;
  }
  CHECK(ra(v).value <= ra_tilde(v).value);
  // Just below r = L/2 the window covers almost a whole period: the signed
  // average nearly cancels while the average of |v| stays at 2.
  GridField magnitude(l);
  for (std::size_t i = 0; i < l.size(); ++i) magnitude.components[0][i] = v.norm_at(i);
  const double r = 8.0 - l.pitch(0);
  CHECK(smooth(v, r).sup_norm() < 0.1);
  CHECK(smooth(magnitude, r).sup_norm() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("scale_field: identity, constant and Ra scaling") {
  const Lattice l = square_lattice(8, 32);
  GridField c(l);
  std::fill(c.components[0].begin(), c.components[0].end(), 3.0);
  std::fill(c.components[1].begin(), c.components[1].end(), -1.0);
  const GridField same = scale_field(c, Real(1));
  CHECK(same.components == c.components);
  const GridField half = scale_field(c, Real(2));
  CHECK(half.lattice.side() == 4.0);
  CHECK(max_abs(half.components[0]) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(max_abs(half.components[1]) == doctest::Approx(0.5).epsilon(1e-15));

  InstanceParams p;
  p.dimension = 2;
  p.side = Real(8);
  p.delta = 0.3;
  const GridMeasure mu = mollify(generate_instance(p, 6), l, 1.0);
  const GridField v = poisson_connect(mu).field;
  for (int t : {2, 4}) {
    const GridField vt = scale_field(v, Real(t));
    CHECK(ra(vt).value == doctest::Approx(ra(v).value / t).epsilon(1e-12));
    // div v = nu - m carries over to the scaled pair cell by cell.
    const GridMeasure d0 = divergence(v);
    const GridMeasure dt = divergence(vt);
    for (std::size_t i = 0; i < l.size(); ++i) CHECK(std::abs(dt.density(i) - d0.density(i)) < 1e-10);
  }
}

TEST_CASE("dipole_field: x = y is zero and a unit segment has L1 mass 1") {
  const Lattice l = square_lattice(4, 64);
  const std::array<double, 2> x{1.0, 2.0};
  CHECK(dipole_field(l, x, x, 1.0).sup_norm() == 0.0);
  const std::array<double, 2> y{2.0, 2.0};
  const GridField v = dipole_field(l, x, y, 1.0);
  CHECK(std::abs(v.l1_norm() - 1.0) <= 0.05);
  CHECK_THROWS_AS(dipole_field(l, x, y, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(dipole_field(square_lattice(4, 16), x, y, 1.0), std::invalid_argument);
}

TEST_CASE("dipole_field: weak divergence pairs to the mollified point difference") {
  const Lattice l = square_lattice(4, 128);
  const std::array<double, 2> x{1.0, 2.0};
  const std::array<double, 2> y{2.0, 2.0};
  const double r = 1.0;
  const GridField v = dipole_field(l, x, y, r);
  const kernels::Stencil ball = ball_stencil(l, dipole_width(r));
  const double h = l.pitch(0);
  const auto ball_average = [&](const TestFunction& phi, const std::array<double, 2>& c) {
    double s = 0.0;
    for (std::size_t o = 0; o < ball.offsets.size(); ++o) {
      const std::array<double, 2> p{c[0] + ball.offsets[o][0] * h, c[1] + ball.offsets[o][1] * h};
      s += ball.weights[o] * phi.value(p);
    }
    return s;
  };
  for (const TestFunction& phi : default_battery(2, 4.0)) {
    double pairing = 0.0;
    for (std::size_t i = 0; i < l.size(); ++i) {
      const auto c = l.center(i);
      const auto g = phi.gradient(std::span<const double>(c.data(), 2));
      pairing += (v.components[0][i] * g[0] + v.components[1][i] * g[1]) * l.cell_volume();
    }
    const double expect = ball_average(phi, y) - ball_average(phi, x);
    CHECK(std::abs(pairing - expect) <= 1e-3 * phi.gradient_bound());
  }
}

TEST_CASE("assemble_transport_field: identity, single entry, linearity, locality") {
  const Lattice l = square_lattice(8, 64);
  const Domain d = l.domain;
  const AtomicMeasure a(d, {Real(1), Real(1), Real(5), Real(6)}, {Real(1), Real::exact(1, 2)});
  const AtomicMeasure b(d, {Real::exact(3, 2), Real(1), Real(5), Real::exact(11, 2)}, {Real(1), Real::exact(1, 2)});
  const double r = 1.0;

  const Coupling id{a, a, {{0, 0, Real(1)}, {1, 1, Real::exact(1, 2)}}};
  CHECK(assemble_transport_field(id, r, l).sup_norm() == 0.0);

  const Coupling g1{a, b, {{0, 0, Real(1)}}};
  const Coupling g2{a, b, {{1, 1, Real::exact(1, 2)}}};
  const Coupling g12{a, b, {{0, 0, Real(1)}, {1, 1, Real::exact(1, 2)}}};
  const GridField v1 = assemble_transport_field(g1, r, l);
  const GridField v2 = assemble_transport_field(g2, r, l);
  const GridField v12 = assemble_transport_field(g12, r, l, Execution::kSerial);
  const GridField dip = dipole_field(l, a.position_approx(1), b.position_approx(1), r);
  for (int k = 0; k < 2; ++k) {
    for (std::size_t i = 0; i < l.size(); ++i) {
      CHECK(std::abs(v2.components[k][i] - 0.5 * dip.components[k][i]) < 1e-12);
      CHECK(std::abs(v12.components[k][i] - v1.components[k][i] - v2.components[k][i]) < 1e-12);
    }
  }
  const double reach = r + dipole_width(r) + l.max_pitch() * std::sqrt(2.0);
  for (std::size_t i = 0; i < l.size(); ++i) {
    bool near = false;
    for (std::size_t e = 0; e < 2; ++e) {
      std::array<double, 2> mid{};
      for (int k = 0; k < 2; ++k) mid[k] = 0.5 * (a.position_approx(e)[k] + b.position_approx(e)[k]);
      near = near || torus_distance(l, l.center(i), mid) <= reach;
    }
    if (!near) CHECK(v12.norm_at(i) == 0.0);
  }
  const Coupling far{a, b, {{0, 1, Real(1)}}};
  CHECK_THROWS_AS(assemble_transport_field(far, r, l), std::invalid_argument);
}
