// Serial references against their OpenMP counterparts, plus direct stencil
// convolution against the FFT path used by mollify.

#include "spreadlab/field.hpp"
#include "spreadlab/kernels.hpp"
#include "spreadlab/laczkovich.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

using namespace spreadlab;

namespace {

struct HallInput {
  std::vector<std::uint32_t> neighbors;
  std::vector<std::int64_t> from, to;
};

// A random bipartite graph without a Hall violation, so the whole lattice of
// subsets is scanned.
HallInput hall_input(int n) {
  std::mt19937_64 rng(7);
  HallInput in;
  for (int i = 0; i < n; ++i) {
    std::uint32_t mask = 1u << i;
    for (int j = 0; j < n; ++j) {
      if (rng() % 3 == 0) mask |= 1u << j;
    }
    in.neighbors.push_back(mask);
    in.from.push_back(1);
    in.to.push_back(1);
  }
  return in;
}

template <bool Parallel>
void BM_HallViolation(benchmark::State& state) {
  const HallInput in = hall_input(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto r = Parallel ? kernels::hall_violation_omp<std::int64_t>(in.neighbors, in.from, in.to, 0)
                      : kernels::hall_violation_serial<std::int64_t>(in.neighbors, in.from, in.to, 0);
    benchmark::DoNotOptimize(r);
  }
}

std::vector<double> noise(std::size_t n) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

Lattice square(std::int64_t cells) { return Lattice::cubic(Domain::torus(2, Real(8)), static_cast<int>(cells)); }

template <bool Parallel>
void BM_ConvolveDirect(benchmark::State& state) {
  const Lattice l = square(state.range(0));
  const std::vector<double> in = noise(l.size());
  const kernels::Stencil s = ball_stencil(l, 0.5);
  for (auto _ : state) {
    auto out = Parallel ? kernels::convolve_direct_omp(l, in, s) : kernels::convolve_direct_serial(l, in, s);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_ConvolveFft(benchmark::State& state) {
  const Lattice l = square(state.range(0));
  GridMeasure mu(l);
  mu.cell_mass = noise(l.size());
  for (auto _ : state) {
    GridMeasure out = mollify(mu, 0.5);
    benchmark::DoNotOptimize(out.cell_mass.data());
  }
}

template <bool Parallel>
void BM_WeakPairing(benchmark::State& state) {
  const Lattice l = square(state.range(0));
  GridField v(l);
  for (auto& c : v.components) c = noise(l.size());
  const std::vector<double> mass = noise(l.size());
  const TestFunction phi = default_battery(2, 8.0).front();
  for (auto _ : state) {
    double r = Parallel ? kernels::weak_pairing_omp(v, mass, phi) : kernels::weak_pairing_serial(v, mass, phi);
    benchmark::DoNotOptimize(r);
  }
}

template <bool Parallel>
void BM_ClaimBatch(benchmark::State& state) {
  const auto count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    ClaimBatch b = Parallel ? claim_batch_omp(2, 5, 3, count) : claim_batch_serial(2, 5, 3, count);
    benchmark::DoNotOptimize(b.failures);
  }
}

}  // namespace

BENCHMARK(BM_HallViolation<false>)->Arg(12)->Arg(16);
BENCHMARK(BM_HallViolation<true>)->Arg(12)->Arg(16);
BENCHMARK(BM_ConvolveDirect<false>)->Arg(64)->Arg(128);
BENCHMARK(BM_ConvolveDirect<true>)->Arg(64)->Arg(128);
BENCHMARK(BM_ConvolveFft)->Arg(64)->Arg(128);
BENCHMARK(BM_WeakPairing<false>)->Arg(128)->Arg(256);
BENCHMARK(BM_WeakPairing<true>)->Arg(128)->Arg(256);
BENCHMARK(BM_ClaimBatch<false>)->Arg(200);
BENCHMARK(BM_ClaimBatch<true>)->Arg(200);

BENCHMARK_MAIN();
