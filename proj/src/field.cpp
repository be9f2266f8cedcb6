#include "spreadlab/field.hpp"

#include "fft.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spreadlab {

namespace {

std::size_t axis(int k) { return static_cast<std::size_t>(k); }

std::size_t shifted(const Lattice& lattice, std::size_t c, int k, int step) {
  auto idx = lattice.unravel(c);
  idx[axis(k)] += step;
  return lattice.ravel(idx);
}

// Spectral derivative along axis k; the own-axis Nyquist mode has no real
// derivative and is dropped.
fft::Spectrum differentiate(fft::Spectrum s, int k) {
  const int n = s.lattice.shape[axis(k)];
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto m = s.frequency(i);
    if (n % 2 == 0 && std::abs(m[axis(k)]) == n / 2) {
      s.data[i] = 0.0;
      continue;
    }
    s.data[i] *= std::complex<double>(0.0, s.wave_vector(i)[axis(k)]);
  }
  return s;
}

double squared_wave_number(const fft::Spectrum& s, std::size_t i) {
  const auto w = s.wave_vector(i);
  return w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
}

GridMeasure from_density(const Lattice& lattice, std::vector<double> density) {
  GridMeasure out(lattice);
  const double volume = lattice.cell_volume();
  for (std::size_t c = 0; c < density.size(); ++c) out.cell_mass[c] = density[c] * volume;
  return out;
}

void check_radius(const Lattice& lattice, double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("mollifier radius must be nonnegative");
  if (r >= lattice.side() / 2.0) throw std::invalid_argument("mollifier radius must be below half the torus side");
}

std::vector<double> convolve_power(const Lattice& lattice, std::span<const double> values, double r, int power) {
  check_radius(lattice, r);
  if (power < 1) throw std::invalid_argument("convolution power must be at least 1");
  if (r == 0.0) return {values.begin(), values.end()};
  const auto stencil = ball_stencil(lattice, r);
  const auto kernel = fft::kernel_spectrum(lattice, stencil.offsets, stencil.weights);
  auto s = fft::forward(lattice, values);
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::complex<double> k = 1.0;
    for (int p = 0; p < power; ++p) k *= kernel.data[i];
    s.data[i] *= k;
  }
  return fft::inverse(s);
}

}  // namespace

GridMeasure divergence(const GridField& v, DerivativeScheme scheme) {
  const Lattice& lattice = v.lattice;
  lattice.validate();
  const int d = lattice.dimension();
  std::vector<double> density(lattice.size(), 0.0);
  if (scheme == DerivativeScheme::kSpectral) {
    fft::Spectrum total;
    for (int k = 0; k < d; ++k) {
      auto dk = differentiate(fft::forward(lattice, v.components[axis(k)]), k);
      if (k == 0) {
        total = std::move(dk);
      } else {
        for (std::size_t i = 0; i < total.size(); ++i) total.data[i] += dk.data[i];
      }
    }
    density = fft::inverse(total);
  } else {
    for (std::size_t c = 0; c < lattice.size(); ++c) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) {
        const auto& comp = v.components[axis(k)];
        s += (comp[shifted(lattice, c, k, 1)] - comp[shifted(lattice, c, k, -1)]) / (2.0 * lattice.pitch(k));
      }
      density[c] = s;
    }
  }
  return from_density(lattice, std::move(density));
}

GridField gradient(const ScalarGrid& u, DerivativeScheme scheme) {
  const Lattice& lattice = u.lattice;
  lattice.validate();
  GridField out(lattice);
  if (scheme == DerivativeScheme::kSpectral) {
    const auto s = fft::forward(lattice, u.values);
    for (int k = 0; k < lattice.dimension(); ++k) out.components[axis(k)] = fft::inverse(differentiate(s, k));
  } else {
    for (int k = 0; k < lattice.dimension(); ++k) {
      for (std::size_t c = 0; c < lattice.size(); ++c) {
        out.components[axis(k)][c] =
            (u.values[shifted(lattice, c, k, 1)] - u.values[shifted(lattice, c, k, -1)]) / (2.0 * lattice.pitch(k));
      }
    }
  }
  return out;
}

GridMeasure laplacian(const ScalarGrid& u, DerivativeScheme scheme) {
  const Lattice& lattice = u.lattice;
  lattice.validate();
  std::vector<double> density(lattice.size(), 0.0);
  if (scheme == DerivativeScheme::kSpectral) {
    auto s = fft::forward(lattice, u.values);
    for (std::size_t i = 0; i < s.size(); ++i) s.data[i] *= -squared_wave_number(s, i);
    density = fft::inverse(s);
  } else {
    for (std::size_t c = 0; c < lattice.size(); ++c) {
      double acc = 0.0;
      for (int k = 0; k < lattice.dimension(); ++k) {
        const double h = lattice.pitch(k);
        acc += (u.values[shifted(lattice, c, k, 1)] - 2.0 * u.values[c] + u.values[shifted(lattice, c, k, -1)]) / (h * h);
      }
      density[c] = acc;
    }
  }
  return from_density(lattice, std::move(density));
}

namespace {

PoissonSolution solve_unchecked(const GridMeasure& mu) {
  const Lattice& lattice = mu.lattice;
  std::vector<double> density(lattice.size());
  for (std::size_t c = 0; c < density.size(); ++c) density[c] = mu.density(c);
  auto s = fft::forward(lattice, density);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double k2 = squared_wave_number(s, i);
    s.data[i] = k2 == 0.0 ? std::complex<double>(0.0) : -s.data[i] / k2;
  }
  ScalarGrid potential(lattice);
  potential.values = fft::inverse(s);
  GridField field = gradient(potential, DerivativeScheme::kSpectral);
  return {std::move(potential), std::move(field)};
}

}  // namespace

PoissonSolution poisson_solve(const GridMeasure& signed_measure) {
  signed_measure.lattice.validate();
  double total = 0.0;
  double variation = 0.0;
  for (double m : signed_measure.cell_mass) {
    total += m;
    variation += std::abs(m);
  }
  if (std::abs(total) > 1e-9 * variation) {
    throw std::invalid_argument("the Poisson equation on the torus needs a measure of total mass zero");
  }
  return solve_unchecked(signed_measure);
}

GridMeasure minus_lebesgue(const GridMeasure& nu) {
  GridMeasure out = nu;
  const double volume = nu.lattice.cell_volume();
  for (double& m : out.cell_mass) m -= volume;
  return out;
}

PoissonSolution poisson_connect(const GridMeasure& nu) {
  nu.lattice.validate();
  const double volume = nu.lattice.domain.volume();
  if (std::abs(nu.total() - volume) > 1e-9 * volume) {
    throw std::invalid_argument("measure is not mass-balanced: total " + std::to_string(nu.total()) +
                                " vs domain volume " + std::to_string(volume));
  }
  return solve_unchecked(minus_lebesgue(nu));
}

DivergenceReport weak_divergence_report(const GridField& v, const GridMeasure& signed_measure,
                                        std::span<const TestFunction> battery, Execution exec) {
  if (!(v.lattice == signed_measure.lattice)) throw std::invalid_argument("field and measure live on different lattices");
  DivergenceReport report;
  for (const auto& phi : battery) {
    const double r = std::abs(kernels::weak_pairing(v, signed_measure.cell_mass, phi, exec));
    report.residuals.push_back(r);
    report.max_residual = std::max(report.max_residual, r);
  }
  return report;
}

kernels::Stencil ball_stencil(const Lattice& lattice, double r) {
  check_radius(lattice, r);
  const int d = lattice.dimension();
  std::array<int, 3> reach{0, 0, 0};
  for (int k = 0; k < d; ++k) reach[axis(k)] = static_cast<int>(std::floor(r / lattice.pitch(k)));
  kernels::Stencil s;
  for (int a = -reach[0]; a <= reach[0]; ++a) {
    for (int b = -reach[1]; b <= reach[1]; ++b) {
      for (int c = -reach[2]; c <= reach[2]; ++c) {
        const std::array<int, 3> o{a, b, c};
        double len2 = 0.0;
        for (int k = 0; k < d; ++k) {
          const double x = o[axis(k)] * lattice.pitch(k);
          len2 += x * x;
        }
        if (len2 <= r * r) s.offsets.push_back(o);
      }
    }
  }
  s.weights.assign(s.offsets.size(), 1.0 / static_cast<double>(s.offsets.size()));
  return s;
}

GridMeasure mollify(const GridMeasure& mu, double r, int power) {
  GridMeasure out(mu.lattice);
  out.cell_mass = convolve_power(mu.lattice, mu.cell_mass, r, power);
  return out;
}

GridMeasure mollify(const AtomicMeasure& nu, const Lattice& lattice, double r, int power) {
  return mollify(deposit(nu, lattice), r, power);
}

ScalarGrid smooth(const ScalarGrid& u, double r, int power) {
  ScalarGrid out(u.lattice);
  out.values = convolve_power(u.lattice, u.values, r, power);
  return out;
}

GridField smooth(const GridField& v, double r, int power) {
  GridField out(v.lattice);
  for (std::size_t k = 0; k < v.components.size(); ++k) {
    out.components[k] = convolve_power(v.lattice, v.components[k], r, power);
  }
  return out;
}

GridField scale_field(const GridField& v, const Real& t, std::optional<std::array<int, 3>> target_shape, bool strict) {
  if (!(t > Real(0))) throw std::invalid_argument("scale factor t must be positive");
  const double inv_t = 1.0 / t.to_double();
  Lattice scaled = v.lattice;
  scaled.domain.side = v.lattice.domain.side / t;
  const int d = v.lattice.dimension();
  if (!target_shape || *target_shape == v.lattice.shape) {
    GridField out(scaled);
    for (std::size_t k = 0; k < out.components.size(); ++k) {
      for (std::size_t c = 0; c < scaled.size(); ++c) out.components[k][c] = v.components[k][c] * inv_t;
    }
    return out;
  }
  scaled.shape = *target_shape;
  scaled.validate();
  bool commensurable = true;
  for (int k = 0; k < d; ++k) {
    const int n = v.lattice.shape[axis(k)];
    const int m = scaled.shape[axis(k)];
    commensurable = commensurable && n % m == 0 && (n / m) % 2 == 1;
  }
  if (!commensurable && strict) {
    throw std::invalid_argument("target lattice is not commensurable with the scaled field (strict mode)");
  }
  GridField out(scaled);
  for (std::size_t c = 0; c < scaled.size(); ++c) {
    const auto idx = scaled.unravel(c);
    // The scaled cell centre maps back to fractional old index u per axis.
    std::array<double, 3> u{0.0, 0.0, 0.0};
    for (int k = 0; k < d; ++k) {
      const double ratio = static_cast<double>(v.lattice.shape[axis(k)]) / scaled.shape[axis(k)];
      u[axis(k)] = (idx[axis(k)] + 0.5) * ratio - 0.5;
    }
    std::array<int, 3> base{0, 0, 0};
    std::array<double, 3> frac{0.0, 0.0, 0.0};
    for (int k = 0; k < d; ++k) {
      base[axis(k)] = static_cast<int>(std::floor(u[axis(k)]));
      frac[axis(k)] = u[axis(k)] - base[axis(k)];
    }
    for (int corner = 0; corner < (1 << d); ++corner) {
      double w = 1.0;
      std::array<int, 3> at = base;
      for (int k = 0; k < d; ++k) {
        const bool up = (corner >> k) & 1;
        w *= up ? frac[axis(k)] : 1.0 - frac[axis(k)];
        at[axis(k)] += up ? 1 : 0;
      }
      if (w == 0.0) continue;
      const std::size_t src = v.lattice.ravel(at);
      for (std::size_t k = 0; k < out.components.size(); ++k) out.components[k][c] += w * v.components[k][src] * inv_t;
    }
  }
  return out;
}

ScalarGrid scale_potential(const ScalarGrid& u, const Real& t) {
  if (!(t > Real(0))) throw std::invalid_argument("scale factor t must be positive");
  Lattice scaled = u.lattice;
  scaled.domain.side = u.lattice.domain.side / t;
  ScalarGrid out(scaled);
  const double f = 1.0 / (t.to_double() * t.to_double());
  for (std::size_t c = 0; c < u.values.size(); ++c) out.values[c] = u.values[c] * f;
  return out;
}

std::vector<double> ra_radii(const Lattice& lattice) {
  std::vector<double> radii{0.0};
  const double half = lattice.side() / 2.0;
  for (double r = lattice.max_pitch(); r < half; r *= 2.0) radii.push_back(r);
  return radii;
}

namespace {

// Shared driver: the components are smoothed at each sampled radius and the
// pointwise Euclidean norm of the result is maximized.
RaResult ra_over_components(const Lattice& lattice, const std::vector<std::vector<double>>& comps) {
  RaResult out;
  out.value = std::numeric_limits<double>::infinity();
  std::vector<fft::Spectrum> spectra;
  for (const auto& c : comps) spectra.push_back(fft::forward(lattice, c));
  for (double r : ra_radii(lattice)) {
    std::vector<double> norm2(lattice.size(), 0.0);
    if (r == 0.0) {
      for (const auto& c : comps) {
        for (std::size_t i = 0; i < c.size(); ++i) norm2[i] += c[i] * c[i];
      }
    } else {
      const auto stencil = ball_stencil(lattice, r);
      const auto kernel = fft::kernel_spectrum(lattice, stencil.offsets, stencil.weights);
      for (const auto& s : spectra) {
        fft::Spectrum m = s;
        for (std::size_t i = 0; i < m.size(); ++i) m.data[i] *= kernel.data[i];
        const auto c = fft::inverse(m);
        for (std::size_t i = 0; i < c.size(); ++i) norm2[i] += c[i] * c[i];
      }
    }
    const double sup = std::sqrt(*std::max_element(norm2.begin(), norm2.end()));
    out.samples.push_back({r, sup});
    if (r + sup < out.value) {
      out.value = r + sup;
      out.argmin_r = r;
    }
  }
  return out;
}

}  // namespace

RaResult ra(const GridField& v) { return ra_over_components(v.lattice, v.components); }

RaResult ra_tilde(const GridField& v) {
  std::vector<double> norm(v.lattice.size());
  for (std::size_t i = 0; i < norm.size(); ++i) norm[i] = v.norm_at(i);
  return ra_over_components(v.lattice, {norm});
}

namespace {

struct Segment {
  std::array<double, 3> start{};
  std::array<double, 3> delta{};  // shortest torus displacement
  double length = 0.0;
};

Segment make_segment(const Lattice& lattice, std::span<const double> x, std::span<const double> y) {
  Segment s;
  const double side = lattice.side();
  for (int k = 0; k < lattice.dimension(); ++k) {
    double dk = y[axis(k)] - x[axis(k)];
    dk -= side * std::round(dk / side);
    s.start[axis(k)] = x[axis(k)];
    s.delta[axis(k)] = dk;
    s.length += dk * dk;
  }
  s.length = std::sqrt(s.length);
  return s;
}

// Current = tangent * arclength, sampled at midpoints of pieces no longer than
// a quarter cell and deposited by cloud-in-cell onto the cell centres.
void deposit_current(const Lattice& lattice, const Segment& seg, double weight,
                     std::vector<std::vector<double>>& current) {
  if (seg.length == 0.0 || weight == 0.0) return;
  const int d = lattice.dimension();
  double hmin = lattice.pitch(0);
  for (int k = 1; k < d; ++k) hmin = std::min(hmin, lattice.pitch(k));
  const auto pieces = static_cast<std::size_t>(std::ceil(seg.length / (hmin / 4.0)));
  const double ds = weight / static_cast<double>(pieces);  // tangent * |piece| = delta / pieces
  for (std::size_t j = 0; j < pieces; ++j) {
    const double t = (static_cast<double>(j) + 0.5) / static_cast<double>(pieces);
    std::array<int, 3> base{0, 0, 0};
    std::array<double, 3> frac{0.0, 0.0, 0.0};
    for (int k = 0; k < d; ++k) {
      const double u = (seg.start[axis(k)] + t * seg.delta[axis(k)]) / lattice.pitch(k) - 0.5;
      base[axis(k)] = static_cast<int>(std::floor(u));
      frac[axis(k)] = u - base[axis(k)];
    }
    for (int corner = 0; corner < (1 << d); ++corner) {
      double w = ds;
      std::array<int, 3> at = base;
      for (int k = 0; k < d; ++k) {
        const bool up = (corner >> k) & 1;
        w *= up ? frac[axis(k)] : 1.0 - frac[axis(k)];
        at[axis(k)] += up ? 1 : 0;
      }
      const std::size_t c = lattice.ravel(at);
      for (int k = 0; k < d; ++k) current[axis(k)][c] += w * seg.delta[axis(k)];
    }
  }
}

void check_dipole_resolution(const Lattice& lattice, double r) {
  if (lattice.max_pitch() > r / 8.0 * (1.0 + 1e-12)) {
    throw std::invalid_argument("grid pitch is too coarse for the dipole radius (need pitch <= r/8)");
  }
}

GridField finish_field(const Lattice& lattice, std::vector<std::vector<double>> current, double r, Execution exec) {
  const auto stencil = ball_stencil(lattice, dipole_width(r));
  const double inv_volume = 1.0 / lattice.cell_volume();
  GridField out(lattice);
  for (std::size_t k = 0; k < current.size(); ++k) {
    out.components[k] = kernels::convolve_direct(lattice, current[k], stencil, exec);
    for (double& x : out.components[k]) x *= inv_volume;
  }
  return out;
}

}  // namespace

GridField dipole_field(const Lattice& lattice, std::span<const double> x, std::span<const double> y, double r) {
  lattice.validate();
  const Segment seg = make_segment(lattice, x, y);
  if (seg.length == 0.0) return GridField(lattice);
  if (r < seg.length * (1.0 - 1e-12)) throw std::invalid_argument("dipole radius r is smaller than |x - y|");
  check_dipole_resolution(lattice, r);
  std::vector<std::vector<double>> current(static_cast<std::size_t>(lattice.dimension()),
                                           std::vector<double>(lattice.size(), 0.0));
  deposit_current(lattice, seg, 1.0, current);
  return finish_field(lattice, std::move(current), r, Execution::kParallel);
}

GridField assemble_transport_field(const Coupling& coupling, double r, const Lattice& lattice, Execution exec) {
  lattice.validate();
  if (!(coupling.source.domain() == lattice.domain) || !(coupling.target.domain() == lattice.domain)) {
    throw std::invalid_argument("coupling and lattice live on different domains");
  }
  std::vector<std::vector<double>> current(static_cast<std::size_t>(lattice.dimension()),
                                           std::vector<double>(lattice.size(), 0.0));
  bool any = false;
  for (const auto& e : coupling.entries) {
    const Segment seg =
        make_segment(lattice, coupling.source.position_approx(e.source), coupling.target.position_approx(e.target));
    if (seg.length > r * (1.0 + 1e-12)) {
      throw std::invalid_argument("coupling entry longer than the assembly radius r");
    }
    if (seg.length == 0.0) continue;
    if (!any) check_dipole_resolution(lattice, r);
    any = true;
    deposit_current(lattice, seg, e.weight.to_double(), current);
  }
  if (!any) return GridField(lattice);
  return finish_field(lattice, std::move(current), r, exec);
}

}  // namespace spreadlab
