#include "spreadlab/kernels.hpp"

#include <omp.h>

#include <bit>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace spreadlab {

void apply_thread_limit_from_env() {
  if (const char* env = std::getenv("SPREADLAB_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }
}

namespace kernels {

namespace {

constexpr std::size_t kMaxHallAtoms = 20;

template <class Mass>
std::vector<Mass> subset_sums(std::span<const Mass> mass) {
  std::vector<Mass> sums(std::size_t{1} << mass.size(), Mass{});
  for (std::size_t m = 1; m < sums.size(); ++m) {
    sums[m] = sums[m & (m - 1)] + mass[static_cast<std::size_t>(std::countr_zero(m))];
  }
  return sums;
}

std::vector<std::uint32_t> neighbor_unions(std::span<const std::uint32_t> neighbors) {
  std::vector<std::uint32_t> unions(std::size_t{1} << neighbors.size(), 0u);
  for (std::size_t m = 1; m < unions.size(); ++m) {
    unions[m] = unions[m & (m - 1)] | neighbors[static_cast<std::size_t>(std::countr_zero(m))];
  }
  return unions;
}

bool better(std::uint32_t a, std::uint32_t b) {
  const int pa = std::popcount(a);
  const int pb = std::popcount(b);
  return pa != pb ? pa < pb : a < b;
}

template <class Mass>
void check_hall_sizes(std::span<const std::uint32_t> neighbors, std::span<const Mass> from_mass,
                      std::span<const Mass> to_mass) {
  if (neighbors.size() != from_mass.size()) throw std::invalid_argument("one neighbour mask per atom expected");
  if (from_mass.size() > kMaxHallAtoms || to_mass.size() > kMaxHallAtoms) {
    throw std::invalid_argument("subset enumeration is limited to 20 atoms per side");
  }
}

}  // namespace

template <class Mass>
std::optional<std::uint32_t> hall_violation_serial(std::span<const std::uint32_t> neighbors,
                                                   std::span<const Mass> from_mass,
                                                   std::span<const Mass> to_mass, Mass tolerance) {
  check_hall_sizes(neighbors, from_mass, to_mass);
  const auto from_sum = subset_sums(from_mass);
  const auto to_sum = subset_sums(to_mass);
  const auto unions = neighbor_unions(neighbors);
  std::optional<std::uint32_t> best;
  for (std::size_t m = 1; m < from_sum.size(); ++m) {
    if (from_sum[m] > to_sum[unions[m]] + tolerance) {
      const auto mask = static_cast<std::uint32_t>(m);
      if (!best || better(mask, *best)) best = mask;
    }
  }
  return best;
}

template <class Mass>
std::optional<std::uint32_t> hall_violation_omp(std::span<const std::uint32_t> neighbors,
                                                std::span<const Mass> from_mass,
                                                std::span<const Mass> to_mass, Mass tolerance) {
  check_hall_sizes(neighbors, from_mass, to_mass);
  const auto from_sum = subset_sums(from_mass);
  const auto to_sum = subset_sums(to_mass);
  const auto unions = neighbor_unions(neighbors);
  const auto count = static_cast<std::int64_t>(from_sum.size());
  std::uint32_t best = 0;  // 0 = none; the empty set never violates
#pragma omp parallel
  {
    std::uint32_t local = 0;
#pragma omp for schedule(static)
    for (std::int64_t m = 1; m < count; ++m) {
      const auto mask = static_cast<std::uint32_t>(m);
      if (from_sum[mask] > to_sum[unions[mask]] + tolerance && (local == 0 || better(mask, local))) local = mask;
    }
#pragma omp critical
    {
      if (local != 0 && (best == 0 || better(local, best))) best = local;
    }
  }
  if (best == 0) return std::nullopt;
  return best;
}

template std::optional<std::uint32_t> hall_violation_serial<std::int64_t>(
    std::span<const std::uint32_t>, std::span<const std::int64_t>, std::span<const std::int64_t>, std::int64_t);
template std::optional<std::uint32_t> hall_violation_serial<double>(
    std::span<const std::uint32_t>, std::span<const double>, std::span<const double>, double);
template std::optional<std::uint32_t> hall_violation_omp<std::int64_t>(
    std::span<const std::uint32_t>, std::span<const std::int64_t>, std::span<const std::int64_t>, std::int64_t);
template std::optional<std::uint32_t> hall_violation_omp<double>(
    std::span<const std::uint32_t>, std::span<const double>, std::span<const double>, double);

namespace {

inline double gather(const Lattice& lattice, std::span<const double> in, const Stencil& stencil, std::size_t c) {
  const auto idx = lattice.unravel(c);
  double s = 0.0;
  for (std::size_t o = 0; o < stencil.offsets.size(); ++o) {
    const auto& off = stencil.offsets[o];
    s += stencil.weights[o] * in[lattice.ravel({idx[0] - off[0], idx[1] - off[1], idx[2] - off[2]})];
  }
  return s;
}

void check_conv(const Lattice& lattice, std::span<const double> in, const Stencil& stencil) {
  if (in.size() != lattice.size()) throw std::invalid_argument("grid size does not match the lattice");
  if (stencil.offsets.size() != stencil.weights.size()) throw std::invalid_argument("malformed stencil");
}

}  // namespace

std::vector<double> convolve_direct_serial(const Lattice& lattice, std::span<const double> in, const Stencil& stencil) {
  check_conv(lattice, in, stencil);
  std::vector<double> out(in.size());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = gather(lattice, in, stencil, c);
  return out;
}

std::vector<double> convolve_direct_omp(const Lattice& lattice, std::span<const double> in, const Stencil& stencil) {
  check_conv(lattice, in, stencil);
  std::vector<double> out(in.size());
  const auto n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < n; ++c) {
    out[static_cast<std::size_t>(c)] = gather(lattice, in, stencil, static_cast<std::size_t>(c));
  }
  return out;
}

std::vector<double> convolve_direct(const Lattice& lattice, std::span<const double> in, const Stencil& stencil,
                                    Execution exec) {
  return exec == Execution::kSerial ? convolve_direct_serial(lattice, in, stencil)
                                    : convolve_direct_omp(lattice, in, stencil);
}

namespace {

inline double pairing_term(const GridField& v, std::span<const double> mu, const TestFunction& phi, std::size_t c,
                           double volume) {
  const auto x = v.lattice.center(c);
  const auto g = phi.gradient(x);
  double dot = 0.0;
  for (std::size_t k = 0; k < v.components.size(); ++k) dot += v.components[k][c] * g[k];
  return dot * volume + phi.value(x) * mu[c];
}

void check_pairing(const GridField& v, std::span<const double> mu) {
  if (mu.size() != v.lattice.size()) throw std::invalid_argument("measure and field sizes differ");
}

}  // namespace

double weak_pairing_serial(const GridField& v, std::span<const double> signed_mass, const TestFunction& phi) {
  check_pairing(v, signed_mass);
  const double volume = v.lattice.cell_volume();
  double s = 0.0;
  for (std::size_t c = 0; c < v.lattice.size(); ++c) s += pairing_term(v, signed_mass, phi, c, volume);
  return s;
}

double weak_pairing_omp(const GridField& v, std::span<const double> signed_mass, const TestFunction& phi) {
  check_pairing(v, signed_mass);
  const double volume = v.lattice.cell_volume();
  const auto n = static_cast<std::int64_t>(v.lattice.size());
  double s = 0.0;
#pragma omp parallel for reduction(+ : s) schedule(static)
  for (std::int64_t c = 0; c < n; ++c) s += pairing_term(v, signed_mass, phi, static_cast<std::size_t>(c), volume);
  return s;
}

double weak_pairing(const GridField& v, std::span<const double> signed_mass, const TestFunction& phi, Execution exec) {
  return exec == Execution::kSerial ? weak_pairing_serial(v, signed_mass, phi) : weak_pairing_omp(v, signed_mass, phi);
}

}  // namespace kernels
}  // namespace spreadlab
