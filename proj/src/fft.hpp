#pragma once

// Thin RAII layer over FFTW's real-to-complex transforms on a Lattice.
// Planning is serialized through a global mutex (the FFTW planner is not
// thread-safe); executing a plan is.

#include "spreadlab/grid.hpp"

#include <complex>
#include <span>
#include <vector>

namespace spreadlab::fft {

/// Shape of the half-complex spectrum: the last used axis is cut to n/2 + 1.
struct Spectrum {
  Lattice lattice;
  std::array<int, 3> shape{1, 1, 1};
  std::vector<std::complex<double>> data;

  std::size_t size() const { return data.size(); }
  /// Signed integer frequency per axis of flat spectrum index i.
  std::array<int, 3> frequency(std::size_t i) const;
  /// True when some used axis sits at the Nyquist frequency n/2 (n even).
  bool is_nyquist(std::size_t i) const;
  /// Angular wave vector 2 pi m / L.
  std::array<double, 3> wave_vector(std::size_t i) const;
};

Spectrum forward(const Lattice& lattice, std::span<const double> values);
/// Normalized inverse: inverse(forward(x)) == x up to rounding.
std::vector<double> inverse(const Spectrum& spectrum);

/// Spectrum of a periodic convolution kernel given by a stencil of cell
/// offsets and weights.
Spectrum kernel_spectrum(const Lattice& lattice, const std::vector<std::array<int, 3>>& offsets,
                         const std::vector<double>& weights);

}  // namespace spreadlab::fft
