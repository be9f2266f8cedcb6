#pragma once

// Data-parallel inner loops. Every kernel has a plain serial reference
// (`*_serial`) and an OpenMP version (`*_omp`) that must agree with it; the
// tests compare the two and bench/ times them.

#include "spreadlab/grid.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace spreadlab {

enum class Execution { kSerial, kParallel };

/// Caps the OpenMP team size from SPREADLAB_THREADS, if set.
void apply_thread_limit_from_env();

namespace kernels {

// --- Hall-condition subset enumeration -------------------------------------

/// Smallest violating subset C of the "from" atoms, i.e. one with
/// from_mass(C) > to_mass(N(C)) + tolerance, where N(C) is the union of the
/// neighbour bitmasks of C. Ties: fewest atoms, then lowest bitmask.
/// At most 20 atoms per side.
template <class Mass>
std::optional<std::uint32_t> hall_violation_serial(std::span<const std::uint32_t> neighbors,
                                                   std::span<const Mass> from_mass,
                                                   std::span<const Mass> to_mass, Mass tolerance);
template <class Mass>
std::optional<std::uint32_t> hall_violation_omp(std::span<const std::uint32_t> neighbors,
                                                std::span<const Mass> from_mass,
                                                std::span<const Mass> to_mass, Mass tolerance);

// --- Periodic direct convolution --------------------------------------------

struct Stencil {
  std::vector<std::array<int, 3>> offsets;
  std::vector<double> weights;
};

/// out[c] = sum_o w_o * in[c - o] with periodic wrap.
std::vector<double> convolve_direct_serial(const Lattice& lattice, std::span<const double> in, const Stencil& stencil);
std::vector<double> convolve_direct_omp(const Lattice& lattice, std::span<const double> in, const Stencil& stencil);
std::vector<double> convolve_direct(const Lattice& lattice, std::span<const double> in, const Stencil& stencil,
                                    Execution exec = Execution::kParallel);

// --- Weak-divergence quadrature ---------------------------------------------

/// sum_c <v_c, grad phi(x_c)> h^d + sum_c phi(x_c) mu_c, where mu is a signed
/// cell-mass vector. Zero (up to quadrature) when div v = mu in the weak sense.
double weak_pairing_serial(const GridField& v, std::span<const double> signed_mass, const TestFunction& phi);
double weak_pairing_omp(const GridField& v, std::span<const double> signed_mass, const TestFunction& phi);
double weak_pairing(const GridField& v, std::span<const double> signed_mass, const TestFunction& phi,
                    Execution exec = Execution::kParallel);

}  // namespace kernels
}  // namespace spreadlab
