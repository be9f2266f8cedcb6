#include "spreadlab/laczkovich.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace spreadlab {

namespace {

std::size_t axis(int k) { return static_cast<std::size_t>(k); }

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

Integer power(std::int64_t base, int exponent) {
  Integer out = 1;
  for (int i = 0; i < exponent; ++i) out *= base;
  return out;
}

void check_dimension(int d) {
  if (d < 1 || d > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
}

// Calls f(anchor) for every anchor in the box [lo, hi] (inclusive) on the used axes.
template <class F>
void for_each_in_box(int d, const Anchor& lo, const Anchor& hi, F&& f) {
  Anchor a{0, 0, 0};
  for (a[0] = lo[0]; a[0] <= hi[0]; ++a[0]) {
    for (a[1] = d > 1 ? lo[1] : 0; a[1] <= (d > 1 ? hi[1] : 0); ++a[1]) {
      for (a[2] = d > 2 ? lo[2] : 0; a[2] <= (d > 2 ? hi[2] : 0); ++a[2]) f(a);
    }
  }
}

}  // namespace

Integer CubeUnion::volume() const { return Integer(cubes.size()) * power(edge, dimension); }

std::int64_t exposed_faces(const CubeUnion& u) {
  check_dimension(u.dimension);
  std::int64_t faces = 0;
  for (const auto& a : u.cubes) {
    for (int k = 0; k < u.dimension; ++k) {
      for (int step : {-1, 1}) {
        Anchor n = a;
        n[axis(k)] += step;
        if (!u.contains(n)) ++faces;
      }
    }
  }
  return faces;
}

Integer boundary_area(const CubeUnion& u) { return Integer(exposed_faces(u)) * power(u.edge, u.dimension - 1); }

PointBoxSet PointBoxSet::from_unit_cubes(int dimension, const std::set<Anchor>& anchors) {
  PointBoxSet v;
  v.dimension = dimension;
  v.denominator = 1;
  for (const auto& a : anchors) {
    Anchor hi = a;
    for (int k = 0; k < dimension; ++k) hi[axis(k)] += 1;
    v.add_box(a, hi);
  }
  return v;
}

CubeCover build_ab(const PointBoxSet& v, std::int64_t edge) {
  check_dimension(v.dimension);
  if (edge < 1) throw std::invalid_argument("cube edge M must be at least 1");
  if (v.denominator < 1) throw std::invalid_argument("denominator must be positive");
  const int d = v.dimension;
  CubeCover out;
  out.a.dimension = out.b.dimension = d;
  out.a.edge = out.b.edge = edge;
  const std::int64_t scale = edge * v.denominator;
  for (const auto& box : v.boxes) {
    // The closed cube with anchor a meets [lo, hi] iff a M <= hi and (a + 1) M >= lo.
    Anchor lo{0, 0, 0};
    Anchor hi{0, 0, 0};
    for (int k = 0; k < d; ++k) {
      if (box.lo[axis(k)] > box.hi[axis(k)]) throw std::invalid_argument("box with lo > hi");
      lo[axis(k)] = ceil_div(box.lo[axis(k)], scale) - 1;
      hi[axis(k)] = floor_div(box.hi[axis(k)], scale);
    }
    for_each_in_box(d, lo, hi, [&](const Anchor& a) { out.a.cubes.insert(a); });
  }
  for (const auto& a : out.a.cubes) {
    Anchor lo = a;
    Anchor hi = a;
    for (int k = 0; k < d; ++k) {
      lo[axis(k)] -= 1;
      hi[axis(k)] += 1;
    }
    for_each_in_box(d, lo, hi, [&](const Anchor& b) { out.b.cubes.insert(b); });
  }
  return out;
}

ClaimReport claim_check(const PointBoxSet& v, std::int64_t edge) {
  const CubeCover cover = build_ab(v, edge);
  const int d = v.dimension;
  std::size_t annulus = 0;
  for (const auto& b : cover.b.cubes) annulus += cover.a.contains(b) ? 0 : 1;
  ClaimReport r;
  r.lhs_a = boundary_area(cover.a);
  r.lhs_b = boundary_area(cover.b);
  // (2d / M) * |B \ A| * M^d
  r.rhs = Integer(2 * d) * Integer(annulus) * power(edge, d - 1);
  r.pass = r.lhs_a <= r.rhs && r.lhs_b <= r.rhs;
  return r;
}

std::uint64_t instance_seed(std::uint64_t seed, std::size_t index) {
  // splitmix64 finalizer over the pair
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ull + (static_cast<std::uint64_t>(index) + 1) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

PointBoxSet random_point_box_set(int dimension, std::int64_t edge, std::uint64_t seed, int window) {
  check_dimension(dimension);
  std::mt19937_64 rng(seed);
  PointBoxSet v;
  v.dimension = dimension;
  v.denominator = 4;
  const std::int64_t extent = window * edge * v.denominator;
  std::uniform_int_distribution<int> count(1, 8);
  std::uniform_int_distribution<std::int64_t> coord(0, extent);
  std::uniform_int_distribution<std::int64_t> size(0, 2 * edge * v.denominator);
  std::bernoulli_distribution is_point(0.5);
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    Anchor lo{0, 0, 0};
    Anchor hi{0, 0, 0};
    const bool point = is_point(rng);
    for (int k = 0; k < dimension; ++k) {
      lo[axis(k)] = coord(rng);
      hi[axis(k)] = point ? lo[axis(k)] : std::min(extent, lo[axis(k)] + size(rng));
    }
    v.add_box(lo, hi);
  }
  return v;
}

ClaimBatch claim_batch_serial(int dimension, std::int64_t edge, std::uint64_t seed, std::size_t count) {
  ClaimBatch out;
  out.count = count;
  for (std::size_t i = 0; i < count; ++i) {
    if (!claim_check(random_point_box_set(dimension, edge, instance_seed(seed, i)), edge).pass) {
      if (out.failures++ == 0) out.first_failure = static_cast<std::int64_t>(i);
    }
  }
  return out;
}

ClaimBatch claim_batch_omp(int dimension, std::int64_t edge, std::uint64_t seed, std::size_t count) {
  ClaimBatch out;
  out.count = count;
  const auto n = static_cast<std::int64_t>(count);
  std::size_t failures = 0;
  std::int64_t first = n;
#pragma omp parallel for schedule(dynamic, 8) reduction(+ : failures) reduction(min : first)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    if (!claim_check(random_point_box_set(dimension, edge, instance_seed(seed, idx)), edge).pass) {
      ++failures;
      first = std::min(first, i);
    }
  }
  out.failures = failures;
  out.first_failure = failures == 0 ? -1 : first;
  return out;
}

ClaimBatch claim_batch(int dimension, std::int64_t edge, std::uint64_t seed, std::size_t count, Execution exec) {
  return exec == Execution::kSerial ? claim_batch_serial(dimension, edge, seed, count)
                                    : claim_batch_omp(dimension, edge, seed, count);
}

CubeUnion random_cube_union(int dimension, int window, std::uint64_t seed, int max_boxes) {
  check_dimension(dimension);
  if (window < 1) throw std::invalid_argument("window must be at least 1");
  if (max_boxes < 1) throw std::invalid_argument("max_boxes must be at least 1");
  std::mt19937_64 rng(seed);
  CubeUnion u;
  u.dimension = dimension;
  u.edge = 1;
  std::uniform_int_distribution<int> boxes(1, max_boxes);
  std::uniform_int_distribution<std::int64_t> corner(0, window - 1);
  std::uniform_int_distribution<std::int64_t> extent(1, std::max(1, window / 2));
  const int k = boxes(rng);
  for (int b = 0; b < k; ++b) {
    Anchor lo{0, 0, 0};
    Anchor hi{0, 0, 0};
    for (int a = 0; a < dimension; ++a) {
      lo[axis(a)] = corner(rng);
      hi[axis(a)] = std::min<std::int64_t>(window - 1, lo[axis(a)] + extent(rng) - 1);
    }
    for_each_in_box(dimension, lo, hi, [&](const Anchor& c) { u.cubes.insert(c); });
  }
  return u;
}

Real measure_of(const AtomicMeasure& nu, const CubeUnion& u) {
  if (nu.dimension() != u.dimension) throw std::invalid_argument("measure and cube union dimensions differ");
  Real total(0);
  if (u.cubes.empty() || nu.empty()) return total;
  const int d = u.dimension;
  const Real edge(u.edge);
  Anchor amin = *u.cubes.begin();
  Anchor amax = amin;
  for (const auto& a : u.cubes) {
    for (int k = 0; k < d; ++k) {
      amin[axis(k)] = std::min(amin[axis(k)], a[axis(k)]);
      amax[axis(k)] = std::max(amax[axis(k)], a[axis(k)]);
    }
  }
  const bool periodic = nu.domain().is_torus();
  const Real& side = nu.domain().side;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    const auto p = nu.position(i);
    // Image shifts s with lo <= p + s L <= hi on every axis.
    std::array<std::int64_t, 3> smin{0, 0, 0};
    std::array<std::int64_t, 3> smax{0, 0, 0};
    bool empty_range = false;
    for (int k = 0; k < d; ++k) {
      const Real lo = Real(amin[axis(k)]) * edge;
      const Real hi = Real(amax[axis(k)] + 1) * edge;
      if (periodic) {
        smin[axis(k)] = -floor_to_int((p[axis(k)] - lo) / side);
        smax[axis(k)] = floor_to_int((hi - p[axis(k)]) / side);
      } else if (p[axis(k)] < lo || p[axis(k)] > hi) {
        empty_range = true;
      }
      if (smin[axis(k)] > smax[axis(k)]) empty_range = true;
    }
    if (empty_range) continue;
    for_each_in_box(d, smin, smax, [&](const Anchor& shift) {
      // Candidate anchors of the closed cubes containing the image.
      std::array<std::array<std::int64_t, 2>, 3> cand{};
      std::array<int, 3> ncand{1, 1, 1};
      for (int k = 0; k < d; ++k) {
        const Real q = p[axis(k)] + Real(shift[axis(k)]) * side;
        const std::int64_t f = floor_to_int(q / edge);
        cand[axis(k)][0] = f;
        if (Real(f) * edge == q) {
          cand[axis(k)][1] = f - 1;
          ncand[axis(k)] = 2;
        }
      }
      bool inside = false;
      for (int a = 0; a < ncand[0] && !inside; ++a) {
        for (int b = 0; b < ncand[1] && !inside; ++b) {
          for (int c = 0; c < ncand[2] && !inside; ++c) {
            inside = u.contains({cand[0][static_cast<std::size_t>(a)], d > 1 ? cand[1][static_cast<std::size_t>(b)] : 0,
                                 d > 2 ? cand[2][static_cast<std::size_t>(c)] : 0});
          }
        }
      }
      if (inside) total += nu.mass(i);
    });
  }
  return total;
}

RhoEstimate rho_upper_bound(const AtomicMeasure& nu, const std::vector<CubeUnion>& family) {
  RhoEstimate est;
  for (std::size_t f = 0; f < family.size(); ++f) {
    const CubeUnion& u = family[f];
    if (u.edge != 1) throw std::invalid_argument("rho is estimated on unions of unit cubes");
    const std::int64_t faces = exposed_faces(u);
    if (faces == 0) throw std::invalid_argument("cube union with zero boundary");
    const double excess = std::abs((measure_of(nu, u) - Real(static_cast<std::int64_t>(u.count()))).to_double());
    const double ratio = excess / static_cast<double>(faces);
    if (ratio > est.raw) {
      est.raw = ratio;
      est.worst = f;
    }
  }
  est.rho_hat = std::max(1.0, est.raw);
  return est;
}

double rho_analytic_perturbed_lattice(int dimension, double delta) {
  check_dimension(dimension);
  if (!(delta >= 0.0 && delta < 0.5)) throw std::invalid_argument("delta must lie in [0, 1/2)");
  return std::max(1.0, std::ldexp(1.0, dimension - 1));
}

double laczkovich_constant(int dimension) {
  check_dimension(dimension);
  return 9.0 * std::pow(static_cast<double>(dimension), 1.5);
}

std::int64_t laczkovich_edge(double rho, int dimension) {
  if (!(rho >= 1.0)) throw std::invalid_argument("rho must be at least 1");
  return static_cast<std::int64_t>(std::floor(2.0 * rho * dimension)) + 1;
}

namespace {

// Every point of 3Q lies within the largest corner distance of w, for any w in Q.
bool enlargement_within(const Anchor& a, std::int64_t edge, const Anchor& w, int d, double radius) {
  double worst = 0.0;
  for (int k = 0; k < d; ++k) {
    const double lo = static_cast<double>((a[axis(k)] - 1) * edge);
    const double hi = static_cast<double>((a[axis(k)] + 2) * edge);
    const double x = static_cast<double>(w[axis(k)]);
    const double far = std::max(x - lo, hi - x);
    worst += far * far;
  }
  return worst <= radius * radius;
}

}  // namespace

ChainReplay replay_chain(const AtomicMeasure& nu, double rho, const CubeUnion& v) {
  if (v.edge != 1) throw std::invalid_argument("V must be a union of unit cubes");
  const int d = v.dimension;
  const std::int64_t edge = laczkovich_edge(rho, d);
  const double radius = laczkovich_constant(d) * rho;
  const CubeCover cover = build_ab(PointBoxSet::from_unit_cubes(d, v.cubes), edge);
  const Real r = Real::from_number(rho);

  ChainReplay out;
  out.nu_v = measure_of(nu, v);
  out.nu_a = measure_of(nu, cover.a);
  out.nu_b = measure_of(nu, cover.b);
  out.m_v = v.volume();
  out.m_a = cover.a.volume();
  out.m_b = cover.b.volume();
  out.area_a = boundary_area(cover.a);
  out.area_b = boundary_area(cover.b);
  auto as_real = [](const Integer& x) { return Real(Rational(x)); };

  out.a_nu_v_le_nu_a = out.nu_v <= out.nu_a;
  out.b_hypothesis_on_a = out.nu_a <= as_real(out.m_a) + r * as_real(out.area_a);
  out.c_claim_upper = as_real(out.m_a) + r * as_real(out.area_a) <= as_real(out.m_b);
  out.e_hypothesis_on_b = as_real(out.m_b) - r * as_real(out.area_b) <= out.nu_b;
  out.f_claim_lower = out.m_v <= out.m_a && as_real(out.m_a) <= as_real(out.m_b) - r * as_real(out.area_b);

  bool inside = true;
  for (const auto& a : cover.a.cubes) {
    bool found = false;
    for (const auto& c : v.cubes) {
      Anchor w{0, 0, 0};
      bool meets = true;
      for (int k = 0; k < d && meets; ++k) {
        const std::int64_t lo = std::max(c[axis(k)], a[axis(k)] * edge);
        const std::int64_t hi = std::min(c[axis(k)] + 1, (a[axis(k)] + 1) * edge);
        meets = lo <= hi;
        w[axis(k)] = lo;
      }
      if (meets) {
        found = enlargement_within(a, edge, w, d, radius);
        break;
      }
    }
    inside = inside && found;
  }
  out.d_b_inside_neighbourhood = inside;
  out.upper_holds = out.nu_v <= as_real(out.m_b) && inside;
  out.lower_holds = as_real(out.m_v) <= out.nu_b && inside;
  return out;
}

PipelineResult laczkovich_pipeline(const AtomicMeasure& nu, double rho, std::size_t samples, std::uint64_t seed) {
  PipelineResult out;
  out.rho = rho;
  out.edge = laczkovich_edge(rho, nu.dimension());
  out.constant = laczkovich_constant(nu.dimension());
  out.bound = out.constant * rho;
  const int window = std::max<int>(1, static_cast<int>(std::floor(nu.domain().side.to_double())));
  for (std::size_t i = 0; i < samples; ++i) {
    const CubeUnion v = random_cube_union(nu.dimension(), window, instance_seed(seed, i));
    ChainReplay r = replay_chain(nu, rho, v);
    out.chain_holds = out.chain_holds && r.a_nu_v_le_nu_a && r.b_hypothesis_on_a && r.c_claim_upper &&
                      r.d_b_inside_neighbourhood && r.e_hypothesis_on_b && r.f_claim_lower && r.upper_holds &&
                      r.lower_holds;
    out.replays.push_back(std::move(r));
  }
  return out;
}

}  // namespace spreadlab
