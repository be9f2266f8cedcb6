#include "spreadlab/grid.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace spreadlab {

Lattice Lattice::cubic(const Domain& domain, int cells_per_axis) {
  Lattice l;
  l.domain = domain;
  for (int k = 0; k < domain.dimension; ++k) l.shape[static_cast<std::size_t>(k)] = cells_per_axis;
  l.validate();
  return l;
}

Lattice Lattice::with_pitch(const Domain& domain, double pitch) {
  if (!(pitch > 0.0)) throw std::invalid_argument("pitch must be positive");
  const double ratio = domain.side.to_double() / pitch;
  const long n = std::lround(ratio);
  if (std::abs(ratio - static_cast<double>(n)) > 1e-9 * ratio) {
    throw std::invalid_argument("domain side must be an integer multiple of the pitch");
  }
  return cubic(domain, static_cast<int>(n));
}

void Lattice::validate() const {
  domain.validate();
  if (!domain.is_torus()) throw std::invalid_argument("grid objects live on a torus domain");
  for (int k = 0; k < 3; ++k) {
    const int n = shape[static_cast<std::size_t>(k)];
    if (k < domain.dimension ? n < 2 : n != 1) throw std::invalid_argument("lattice needs at least 2 cells per axis");
  }
}

std::size_t Lattice::size() const {
  return static_cast<std::size_t>(shape[0]) * static_cast<std::size_t>(shape[1]) * static_cast<std::size_t>(shape[2]);
}

double Lattice::max_pitch() const {
  double h = 0.0;
  for (int k = 0; k < dimension(); ++k) h = std::max(h, pitch(k));
  return h;
}

double Lattice::cell_volume() const {
  double v = 1.0;
  for (int k = 0; k < dimension(); ++k) v *= pitch(k);
  return v;
}

std::array<int, 3> Lattice::unravel(std::size_t index) const {
  std::array<int, 3> idx{};
  idx[2] = static_cast<int>(index % static_cast<std::size_t>(shape[2]));
  index /= static_cast<std::size_t>(shape[2]);
  idx[1] = static_cast<int>(index % static_cast<std::size_t>(shape[1]));
  idx[0] = static_cast<int>(index / static_cast<std::size_t>(shape[1]));
  return idx;
}

std::size_t Lattice::ravel(std::array<int, 3> idx) const {
  std::size_t out = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    int i = idx[k] % shape[k];
    if (i < 0) i += shape[k];
    out = out * static_cast<std::size_t>(shape[k]) + static_cast<std::size_t>(i);
  }
  return out;
}

std::array<double, 3> Lattice::center(std::size_t index) const {
  const auto idx = unravel(index);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int k = 0; k < dimension(); ++k) {
    x[static_cast<std::size_t>(k)] = (idx[static_cast<std::size_t>(k)] + 0.5) * pitch(k);
  }
  return x;
}

std::size_t Lattice::nearest_cell(std::span<const double> x) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int k = 0; k < dimension(); ++k) {
    idx[static_cast<std::size_t>(k)] = static_cast<int>(std::floor(x[static_cast<std::size_t>(k)] / pitch(k)));
  }
  return ravel(idx);
}

bool operator==(const Lattice& a, const Lattice& b) { return a.domain == b.domain && a.shape == b.shape; }

double ScalarGrid::sup_norm() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

GridMeasure GridMeasure::lebesgue(const Lattice& lattice) {
  GridMeasure m(lattice);
  std::fill(m.cell_mass.begin(), m.cell_mass.end(), lattice.cell_volume());
  return m;
}

double GridMeasure::total() const {
  double s = 0.0;
  for (double v : cell_mass) s += v;
  return s;
}

GridField::GridField(Lattice l) : lattice(std::move(l)) {
  components.assign(static_cast<std::size_t>(lattice.dimension()), std::vector<double>(lattice.size(), 0.0));
}

std::array<double, 3> GridField::at(std::size_t i) const {
  std::array<double, 3> v{0.0, 0.0, 0.0};
  for (std::size_t k = 0; k < components.size(); ++k) v[k] = components[k][i];
  return v;
}

double GridField::norm_at(std::size_t i) const {
  double s = 0.0;
  for (const auto& c : components) s += c[i] * c[i];
  return std::sqrt(s);
}

double GridField::sup_norm() const {
  double m = 0.0;
  for (std::size_t i = 0; i < lattice.size(); ++i) m = std::max(m, norm_at(i));
  return m;
}

double GridField::l1_norm() const {
  double s = 0.0;
  for (std::size_t i = 0; i < lattice.size(); ++i) s += norm_at(i);
  return s * lattice.cell_volume();
}

GridField operator+(const GridField& a, const GridField& b) {
  if (!(a.lattice == b.lattice)) throw std::invalid_argument("fields live on different lattices");
  GridField out = a;
  for (std::size_t k = 0; k < out.components.size(); ++k) {
    for (std::size_t i = 0; i < out.lattice.size(); ++i) out.components[k][i] += b.components[k][i];
  }
  return out;
}

GridField operator*(double s, const GridField& a) {
  GridField out = a;
  for (auto& c : out.components) {
    for (double& v : c) v *= s;
  }
  return out;
}

double TestFunction::value(std::span<const double> x) const {
  const double w = 2.0 * std::numbers::pi / period;
  double s = 0.0;
  for (const auto& m : modes) {
    double arg = m.phase;
    for (int k = 0; k < dimension; ++k) arg += w * m.frequency[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(k)];
    s += m.amplitude * std::cos(arg);
  }
  return s;
}

std::array<double, 3> TestFunction::gradient(std::span<const double> x) const {
  const double w = 2.0 * std::numbers::pi / period;
  std::array<double, 3> g{0.0, 0.0, 0.0};
  for (const auto& m : modes) {
    double arg = m.phase;
    for (int k = 0; k < dimension; ++k) arg += w * m.frequency[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(k)];
    const double s = -m.amplitude * std::sin(arg) * w;
    for (int k = 0; k < dimension; ++k) g[static_cast<std::size_t>(k)] += s * m.frequency[static_cast<std::size_t>(k)];
  }
  return g;
}

double TestFunction::gradient_bound() const {
  const double w = 2.0 * std::numbers::pi / period;
  double s = 0.0;
  for (const auto& m : modes) {
    double k2 = 0.0;
    for (int k = 0; k < dimension; ++k) k2 += static_cast<double>(m.frequency[static_cast<std::size_t>(k)]) * m.frequency[static_cast<std::size_t>(k)];
    s += std::abs(m.amplitude) * w * std::sqrt(k2);
  }
  return s;
}

std::vector<TestFunction> default_battery(int dimension, double period, std::uint64_t seed, int count,
                                          int max_frequency) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> freq(-max_frequency, max_frequency);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::vector<TestFunction> out;
  for (int f = 0; f < count; ++f) {
    TestFunction phi;
    phi.dimension = dimension;
    phi.period = period;
    for (int m = 0; m < 3; ++m) {
      TestFunction::Mode mode;
      bool nonzero = false;
      while (!nonzero) {
        for (int k = 0; k < dimension; ++k) {
          mode.frequency[static_cast<std::size_t>(k)] = freq(rng);
          nonzero = nonzero || mode.frequency[static_cast<std::size_t>(k)] != 0;
        }
      }
      mode.amplitude = amp(rng);
      mode.phase = phase(rng);
      phi.modes.push_back(mode);
    }
    out.push_back(std::move(phi));
  }
  return out;
}

GridMeasure deposit(const AtomicMeasure& nu, const Lattice& lattice) {
  lattice.validate();
  if (!(nu.domain() == lattice.domain)) throw std::invalid_argument("measure and lattice live on different domains");
  GridMeasure out(lattice);
  for (std::size_t i = 0; i < nu.size(); ++i) {
    out.cell_mass[lattice.nearest_cell(nu.position_approx(i))] += nu.mass(i).to_double();
  }
  return out;
}

AtomicMeasure atomize(const GridMeasure& mu) {
  const Lattice& lattice = mu.lattice;
  const int d = lattice.dimension();
  std::vector<Real> coords;
  std::vector<Real> masses;
  const Real half = Real::exact(1, 2);
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    if (!(mu.cell_mass[i] > 0.0)) continue;
    const auto idx = lattice.unravel(i);
    for (int k = 0; k < d; ++k) {
      const Real n(static_cast<std::int64_t>(lattice.shape[static_cast<std::size_t>(k)]));
      coords.push_back((Real(static_cast<std::int64_t>(idx[static_cast<std::size_t>(k)])) + half) * lattice.domain.side / n);
    }
    masses.emplace_back(mu.cell_mass[i]);
  }
  return AtomicMeasure(lattice.domain, std::move(coords), std::move(masses));
}

}  // namespace spreadlab
