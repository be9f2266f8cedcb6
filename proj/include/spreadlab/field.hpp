#pragma once

#include "spreadlab/grid.hpp"
#include "spreadlab/kernels.hpp"
#include "spreadlab/transport.hpp"

#include <optional>
#include <span>
#include <vector>

namespace spreadlab {

enum class DerivativeScheme {
  kSpectral,  ///< exact for band-limited data; the Nyquist mode is dropped from first derivatives
  kCentered,  ///< second-order centred differences
};

// --- Differential operators on the torus ------------------------------------

/// Signed cell masses (div v) * h^d. Sums to zero up to rounding.
GridMeasure divergence(const GridField& v, DerivativeScheme scheme = DerivativeScheme::kSpectral);

GridField gradient(const ScalarGrid& u, DerivativeScheme scheme = DerivativeScheme::kSpectral);

/// Signed cell masses (Laplacian u) * h^d. The spectral version keeps the
/// Nyquist mode (symbol -|k|^2), the stencil version is the 2d+1-point one.
GridMeasure laplacian(const ScalarGrid& u, DerivativeScheme scheme = DerivativeScheme::kSpectral);

// --- Poisson ----------------------------------------------------------------

struct PoissonSolution {
  ScalarGrid potential;  ///< zero mean
  GridField field;       ///< gradient of the potential
};

/// Solves Laplacian h = mu for a signed grid measure of total mass zero
/// (within 1e-9 of its total variation).
PoissonSolution poisson_solve(const GridMeasure& signed_measure);

/// Solves Laplacian h = nu - m. The total mass of nu must equal the domain
/// volume within 1e-9 relative.
PoissonSolution poisson_connect(const GridMeasure& nu);

/// nu - m as signed cell masses.
GridMeasure minus_lebesgue(const GridMeasure& nu);

struct DivergenceReport {
  std::vector<double> residuals;
  double max_residual = 0.0;
};

/// |sum <v, grad phi> h^d + sum phi mu| per test function: zero when
/// div v = mu in the weak sense.
DivergenceReport weak_divergence_report(const GridField& v, const GridMeasure& signed_measure,
                                        std::span<const TestFunction> battery,
                                        Execution exec = Execution::kParallel);

// --- Mollifiers ---------------------------------------------------------------

/// The discrete ball rB: cells whose centre offset has length <= r, each
/// weighted 1 / count so the kernel sums to exactly 1. r = 0 is the identity.
kernels::Stencil ball_stencil(const Lattice& lattice, double r);

/// nu * chi_r^{*power} (power 3 is the third convolution power used in the
/// potential bounds). Throws when r >= L/2.
GridMeasure mollify(const GridMeasure& mu, double r, int power = 1);
GridMeasure mollify(const AtomicMeasure& nu, const Lattice& lattice, double r, int power = 1);
ScalarGrid smooth(const ScalarGrid& u, double r, int power = 1);
GridField smooth(const GridField& v, double r, int power = 1);

// --- Scaling ------------------------------------------------------------------

/// v_t(x) = v(t x) / t on the domain of side L / t. Without a target shape the
/// lattice keeps its cell counts (always commensurable). With a target shape
/// n', samples land on old cell centres exactly when n / n' is an odd
/// integer; otherwise `strict` throws and non-strict mode interpolates
/// multilinearly.
GridField scale_field(const GridField& v, const Real& t, std::optional<std::array<int, 3>> target_shape = std::nullopt,
                      bool strict = true);

/// u_t(x) = u(t x) / t^2, the potential of the scaled measure.
ScalarGrid scale_potential(const ScalarGrid& u, const Real& t);

// --- Ra functionals --------------------------------------------------------------

/// {0} together with 2^k h for k >= 0 while 2^k h < L/2 (h the largest pitch).
std::vector<double> ra_radii(const Lattice& lattice);

struct RaResult {
  double value = 0.0;
  double argmin_r = 0.0;
  struct Sample {
    double r;
    double sup;  ///< sup norm of the mollified field at r
  };
  std::vector<Sample> samples;
};

/// min over the sampled r of r + ||v * chi_r||_inf.
RaResult ra(const GridField& v);
/// min over the sampled r of r + || |v| * chi_r ||_inf.
RaResult ra_tilde(const GridField& v);

// --- Dipoles and the transport field ----------------------------------------

/// Mollified segment current from x to y (along the shortest torus image):
/// the unit tangent times arclength, smeared with chi_eps, eps = r / 4.
/// Its weak divergence is delta_x * chi_eps - delta_y * chi_eps. Requires
/// |x - y| <= r and pitch <= r / 8.
GridField dipole_field(const Lattice& lattice, std::span<const double> x, std::span<const double> y, double r);

/// Sum of weight * dipole over the coupling entries, built with one
/// convolution. Every entry must have length <= r.
GridField assemble_transport_field(const Coupling& coupling, double r, const Lattice& lattice,
                                   Execution exec = Execution::kParallel);

/// Mollification width used by the dipoles at radius r.
inline double dipole_width(double r) { return r / 4.0; }

}  // namespace spreadlab
