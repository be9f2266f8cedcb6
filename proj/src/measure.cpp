#include "spreadlab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace spreadlab {

void Domain::validate() const {
  if (dimension < 1 || dimension > 3) {
    throw std::invalid_argument("domain.dimension must be 1, 2 or 3");
  }
  if (side <= Real(0)) throw std::invalid_argument("domain.side must be positive");
}

double Domain::volume() const { return std::pow(side.to_double(), dimension); }

double Domain::diameter() const {
  const double per_axis = is_torus() ? side.to_double() / 2.0 : side.to_double();
  return per_axis * std::sqrt(static_cast<double>(dimension));
}

bool operator==(const Domain& a, const Domain& b) {
  return a.dimension == b.dimension && a.kind == b.kind && a.side == b.side;
}

double distance(const Domain& domain, std::span<const double> a, std::span<const double> b) {
  const double side = domain.side.to_double();
  double sum = 0.0;
  for (int k = 0; k < domain.dimension; ++k) {
    double delta = std::abs(a[k] - b[k]);
    if (domain.is_torus()) delta = std::min(delta, side - delta);
    sum += delta * delta;
  }
  return std::sqrt(sum);
}

Rational squared_distance(const Domain& domain, std::span<const Real> a, std::span<const Real> b) {
  Rational sum = 0;
  const Rational& side = domain.side.rational();
  for (int k = 0; k < domain.dimension; ++k) {
    Rational delta = a[k].rational() - b[k].rational();
    if (delta < 0) delta = -delta;
    if (domain.is_torus() && side - delta < delta) delta = side - delta;
    sum += delta * delta;
  }
  return sum;
}

AtomicMeasure::AtomicMeasure(Domain domain, std::vector<Real> coordinates, std::vector<Real> masses) {
  domain.validate();
  const auto d = static_cast<std::size_t>(domain.dimension);
  if (coordinates.size() != masses.size() * d) {
    throw std::invalid_argument("atom coordinates do not match dimension * atom count");
  }
  auto data = std::make_shared<Data>();
  data->approx.reserve(coordinates.size());
  const Real zero(0);
  for (std::size_t i = 0; i < coordinates.size(); ++i) {
    const Real& x = coordinates[i];
    const bool inside = domain.is_torus() ? (x >= zero && x < domain.side)
                                          : (x >= zero && x <= domain.side);
    if (!inside) {
      throw std::invalid_argument("atom " + std::to_string(i / d) + " lies outside the domain");
    }
    data->exact_positions = data->exact_positions && x.is_exact();
    data->approx.push_back(x.to_double());
  }
  Real total(0);
  for (std::size_t i = 0; i < masses.size(); ++i) {
    if (!(masses[i] > zero)) {
      throw std::invalid_argument("atom " + std::to_string(i) + " has nonpositive mass");
    }
    data->exact_masses = data->exact_masses && masses[i].is_exact();
    total += masses[i];
  }
  data->exact_positions = data->exact_positions && domain.side.is_exact();
  data->domain = std::move(domain);
  data->coordinates = std::move(coordinates);
  data->masses = std::move(masses);
  data->total = total;
  data_ = std::move(data);
}

std::span<const Real> AtomicMeasure::position(std::size_t i) const {
  const auto d = static_cast<std::size_t>(dimension());
  return std::span<const Real>(data_->coordinates).subspan(i * d, d);
}

std::span<const double> AtomicMeasure::position_approx(std::size_t i) const {
  const auto d = static_cast<std::size_t>(dimension());
  return std::span<const double>(data_->approx).subspan(i * d, d);
}

AtomicMeasure scale_measure(const AtomicMeasure& nu, const Real& t, MassScaling mode) {
  if (!(t > Real(0))) throw std::invalid_argument("scale factor t must be positive");
  Domain domain = nu.domain();
  domain.side = domain.side / t;
  std::vector<Real> coords;
  coords.reserve(nu.coordinates().size());
  for (const Real& x : nu.coordinates()) coords.push_back(x / t);
  std::vector<Real> masses(nu.masses().begin(), nu.masses().end());
  if (mode == MassScaling::kLebesgue) {
    Real factor(1);
    for (int k = 0; k < domain.dimension; ++k) factor = factor / t;
    for (Real& m : masses) m = m * factor;
  }
  return AtomicMeasure(std::move(domain), std::move(coords), std::move(masses));
}

namespace {

std::int64_t cells_per_axis(const Domain& domain, const Real& pitch) {
  if (!(pitch > Real(0))) throw std::invalid_argument("pitch must be positive");
  const Real ratio = domain.side / pitch;
  const auto n = static_cast<std::int64_t>(std::llround(ratio.to_double()));
  const bool integral = ratio.is_exact() ? ratio == Real(n)
                                         : std::abs(ratio.to_double() - static_cast<double>(n)) < 1e-9;
  if (!integral || n < 1) throw std::invalid_argument("domain side must be an integer multiple of pitch");
  return n;
}

Real wrap(Real x, const Domain& domain) {
  const Real& side = domain.side;
  if (domain.is_torus()) {
    while (x < Real(0)) x += side;
    while (x >= side) x -= side;
  } else {
    if (x < Real(0)) x = Real(0);
    if (x > side) x = side;
  }
  return x;
}

Real quantize(double v, std::int64_t denominator) {
  if (denominator <= 0) return Real(v);
  return Real::exact(std::llround(v * static_cast<double>(denominator)), denominator);
}

}  // namespace

AtomicMeasure lebesgue_atoms(const Domain& domain, const Real& pitch, const Real* total) {
  domain.validate();
  const std::int64_t n = cells_per_axis(domain, pitch);
  const int d = domain.dimension;
  std::int64_t cells = 1;
  for (int k = 0; k < d; ++k) cells *= n;
  Real cell_mass(1);
  if (total != nullptr) {
    cell_mass = *total / Real(cells);
  } else {
    for (int k = 0; k < d; ++k) cell_mass = cell_mass * pitch;
  }
  std::vector<Real> centers;
  centers.reserve(static_cast<std::size_t>(n));
  const Real half = Real::exact(1, 2);
  for (std::int64_t i = 0; i < n; ++i) centers.push_back((Real(i) + half) * pitch);

  std::vector<Real> coords;
  coords.reserve(static_cast<std::size_t>(cells * d));
  for (std::int64_t c = 0; c < cells; ++c) {
    std::int64_t rest = c;
    std::vector<std::int64_t> index(static_cast<std::size_t>(d));
    for (int k = d - 1; k >= 0; --k) {
      index[static_cast<std::size_t>(k)] = rest % n;
      rest /= n;
    }
    for (int k = 0; k < d; ++k) coords.push_back(centers[static_cast<std::size_t>(index[static_cast<std::size_t>(k)])]);
  }
  return AtomicMeasure(domain, std::move(coords), std::vector<Real>(static_cast<std::size_t>(cells), cell_mass));
}

AtomicMeasure restrict_to(const AtomicMeasure& nu, std::span<const std::uint32_t> atoms) {
  std::vector<Real> coords;
  std::vector<Real> masses;
  for (auto i : atoms) {
    auto p = nu.position(i);
    coords.insert(coords.end(), p.begin(), p.end());
    masses.push_back(nu.mass(i));
  }
  return AtomicMeasure(nu.domain(), std::move(coords), std::move(masses));
}

InstanceKind parse_instance_kind(const std::string& name) {
  if (name == "perturbed_lattice") return InstanceKind::kPerturbedLattice;
  if (name == "poisson_process") return InstanceKind::kPoissonProcess;
  if (name == "cluster") return InstanceKind::kCluster;
  if (name == "ball_uniform") return InstanceKind::kBallUniform;
  throw std::invalid_argument("kind: unknown instance kind '" + name + "'");
}

std::string to_string(InstanceKind kind) {
  switch (kind) {
    case InstanceKind::kPerturbedLattice: return "perturbed_lattice";
    case InstanceKind::kPoissonProcess: return "poisson_process";
    case InstanceKind::kCluster: return "cluster";
    case InstanceKind::kBallUniform: return "ball_uniform";
  }
  return "unknown";
}

namespace {

AtomicMeasure perturbed_lattice(const InstanceParams& p, const Domain& domain, std::mt19937_64& rng) {
  if (!(p.delta >= 0.0 && p.delta < 0.5)) throw std::invalid_argument("delta must lie in [0, 1/2)");
  const Real& side = domain.side;
  const std::int64_t n = floor_to_int(side);
  if (!(side == Real(n))) throw std::invalid_argument("side must be an integer for perturbed_lattice");
  const int d = p.dimension;
  std::int64_t total = 1;
  for (int k = 0; k < d; ++k) total *= n;
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<Real> coords;
  coords.reserve(static_cast<std::size_t>(total * d));
  for (std::int64_t c = 0; c < total; ++c) {
    std::int64_t rest = c;
    std::vector<std::int64_t> z(static_cast<std::size_t>(d));
    for (int k = d - 1; k >= 0; --k) {
      z[static_cast<std::size_t>(k)] = rest % n;
      rest /= n;
    }
    for (int k = 0; k < d; ++k) {
      Real x(z[static_cast<std::size_t>(k)]);
      if (p.delta > 0.0) {
        const double xi = p.delta * unit(rng);
        if (p.denominator > 0) {
          std::int64_t q = std::llround(xi * static_cast<double>(p.denominator));
          const std::int64_t bound = static_cast<std::int64_t>(std::floor(p.delta * static_cast<double>(p.denominator)));
          q = std::clamp(q, -bound, bound);
          x = x + Real::exact(q, p.denominator);
        } else {
          x = Real(static_cast<double>(z[static_cast<std::size_t>(k)]) + xi);
        }
      }
      coords.push_back(wrap(std::move(x), domain));
    }
  }
  return AtomicMeasure(domain, std::move(coords), std::vector<Real>(static_cast<std::size_t>(total), Real(1)));
}

int draw_count(const InstanceParams& p, const Domain& domain, std::mt19937_64& rng) {
  if (p.count < 0) throw std::invalid_argument("count must be nonnegative");
  if (p.count > 0) return p.count;
  if (!(p.intensity > 0.0)) throw std::invalid_argument("intensity must be positive");
  std::poisson_distribution<int> poisson(p.intensity * domain.volume());
  return std::max(1, poisson(rng));
}

Real uniform_coordinate(const InstanceParams& p, const Domain& domain, std::mt19937_64& rng) {
  if (p.denominator > 0) {
    const Real slots = domain.side * Real(p.denominator);
    const std::int64_t n = floor_to_int(slots);
    if (!(slots == Real(n))) throw std::invalid_argument("denominator must divide the side into integer slots");
    std::uniform_int_distribution<std::int64_t> pick(0, domain.is_torus() ? n - 1 : n);
    return Real::exact(pick(rng), p.denominator);
  }
  std::uniform_real_distribution<double> u(0.0, domain.side.to_double());
  return Real(u(rng));
}

AtomicMeasure poisson_process(const InstanceParams& p, const Domain& domain, std::mt19937_64& rng) {
  const int n = draw_count(p, domain, rng);
  std::vector<Real> coords;
  coords.reserve(static_cast<std::size_t>(n * p.dimension));
  for (int i = 0; i < n * p.dimension; ++i) coords.push_back(uniform_coordinate(p, domain, rng));
  return AtomicMeasure(domain, std::move(coords), std::vector<Real>(static_cast<std::size_t>(n), Real(1)));
}

AtomicMeasure cluster(const InstanceParams& p, const Domain& domain, std::mt19937_64& rng) {
  if (p.clusters < 1) throw std::invalid_argument("clusters must be at least 1");
  if (!(p.spread >= 0.0)) throw std::invalid_argument("spread must be nonnegative");
  const int n = draw_count(p, domain, rng);
  const int d = p.dimension;
  std::uniform_real_distribution<double> u(0.0, domain.side.to_double());
  std::vector<double> parents(static_cast<std::size_t>(p.clusters * d));
  for (double& x : parents) x = u(rng);
  std::uniform_int_distribution<int> pick(0, p.clusters - 1);
  std::normal_distribution<double> gauss(0.0, p.spread);
  std::vector<Real> coords;
  coords.reserve(static_cast<std::size_t>(n * d));
  const double side = domain.side.to_double();
  for (int i = 0; i < n; ++i) {
    const int parent = pick(rng);
    for (int k = 0; k < d; ++k) {
      double x = parents[static_cast<std::size_t>(parent * d + k)] + gauss(rng);
      if (domain.is_torus()) {
        x = std::fmod(x, side);
        if (x < 0) x += side;
      }
      Real value = quantize(x, p.denominator);
      coords.push_back(wrap(std::move(value), domain));
    }
  }
  return AtomicMeasure(domain, std::move(coords), std::vector<Real>(static_cast<std::size_t>(n), Real(1)));
}

AtomicMeasure ball_uniform(const InstanceParams& p, const Domain& domain) {
  if (!(p.radius > 0.0)) throw std::invalid_argument("radius must be positive");
  const int d = p.dimension;
  std::vector<Real> center;
  if (p.center.empty()) {
    for (int k = 0; k < d; ++k) center.push_back(domain.side / Real(2));
  } else if (static_cast<int>(p.center.size()) != d) {
    throw std::invalid_argument("center must have one coordinate per dimension");
  } else {
    for (double c : p.center) center.push_back(Real::from_number(c));
  }
  const AtomicMeasure cells = lebesgue_atoms(domain, p.pitch);
  const Real radius = Real::from_number(p.radius);
  bool exact = radius.is_exact() && cells.has_exact_positions();
  for (const Real& c : center) exact = exact && c.is_exact();
  std::vector<double> center_approx;
  for (const Real& c : center) center_approx.push_back(c.to_double());

  std::vector<std::uint32_t> inside;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const bool in = exact ? squared_distance(domain, cells.position(i), center) <= radius.rational() * radius.rational()
                          : distance(domain, cells.position_approx(i), center_approx) <= p.radius;
    if (in) inside.push_back(static_cast<std::uint32_t>(i));
  }
  if (inside.empty()) throw std::invalid_argument("pitch is too coarse: the ball contains no cell centre");
  std::vector<Real> coords;
  for (auto i : inside) {
    auto pos = cells.position(i);
    coords.insert(coords.end(), pos.begin(), pos.end());
  }
  const Real mass = Real(1) / Real(static_cast<std::int64_t>(inside.size()));
  return AtomicMeasure(domain, std::move(coords), std::vector<Real>(inside.size(), mass));
}

}  // namespace

AtomicMeasure generate_instance(const InstanceParams& params, std::uint64_t seed) {
  if (params.dimension < 1 || params.dimension > 3) throw std::invalid_argument("dim must be 1, 2 or 3");
  if (!(params.side > Real(0))) throw std::invalid_argument("side must be positive");
  if (params.denominator < 0) throw std::invalid_argument("denominator must be nonnegative");
  const Domain domain{params.dimension, params.domain, params.side};
  std::mt19937_64 rng(seed);
  switch (params.kind) {
    case InstanceKind::kPerturbedLattice: return perturbed_lattice(params, domain, rng);
    case InstanceKind::kPoissonProcess: return poisson_process(params, domain, rng);
    case InstanceKind::kCluster: return cluster(params, domain, rng);
    case InstanceKind::kBallUniform: return ball_uniform(params, domain);
  }
  throw std::invalid_argument("kind: unsupported");
}

}  // namespace spreadlab
