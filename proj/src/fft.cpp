#include "fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace spreadlab::fft {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::array<int, 3> spectrum_shape(const Lattice& lattice) {
  std::array<int, 3> s = lattice.shape;
  const auto last = static_cast<std::size_t>(lattice.dimension() - 1);
  s[last] = s[last] / 2 + 1;
  return s;
}

struct Buffers {
  double* real = nullptr;
  fftw_complex* complex = nullptr;
  Buffers(std::size_t nr, std::size_t nc)
      : real(fftw_alloc_real(nr)), complex(fftw_alloc_complex(nc)) {
    if (real == nullptr || complex == nullptr) throw std::bad_alloc();
  }
  ~Buffers() {
    fftw_free(real);
    fftw_free(complex);
  }
  Buffers(const Buffers&) = delete;
  Buffers& operator=(const Buffers&) = delete;
};

class Plan {
 public:
  explicit Plan(fftw_plan p) : plan_(p) {
    if (plan_ == nullptr) throw std::runtime_error("FFTW could not create a plan");
  }
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

}  // namespace

std::array<int, 3> Spectrum::frequency(std::size_t i) const {
  std::array<int, 3> idx{};
  idx[2] = static_cast<int>(i % static_cast<std::size_t>(shape[2]));
  i /= static_cast<std::size_t>(shape[2]);
  idx[1] = static_cast<int>(i % static_cast<std::size_t>(shape[1]));
  idx[0] = static_cast<int>(i / static_cast<std::size_t>(shape[1]));
  const int last = lattice.dimension() - 1;
  for (int k = 0; k < lattice.dimension(); ++k) {
    const int n = lattice.shape[static_cast<std::size_t>(k)];
    int& m = idx[static_cast<std::size_t>(k)];
    if (k != last && m > n / 2) m -= n;
  }
  return idx;
}

bool Spectrum::is_nyquist(std::size_t i) const {
  const auto m = frequency(i);
  for (int k = 0; k < lattice.dimension(); ++k) {
    const int n = lattice.shape[static_cast<std::size_t>(k)];
    if (n % 2 == 0 && std::abs(m[static_cast<std::size_t>(k)]) == n / 2) return true;
  }
  return false;
}

std::array<double, 3> Spectrum::wave_vector(std::size_t i) const {
  const auto m = frequency(i);
  const double w = 2.0 * std::numbers::pi / lattice.side();
  return {w * m[0], w * m[1], w * m[2]};
}

Spectrum forward(const Lattice& lattice, std::span<const double> values) {
  if (values.size() != lattice.size()) throw std::invalid_argument("grid size does not match the lattice");
  Spectrum s{lattice, spectrum_shape(lattice), {}};
  const std::size_t nc = static_cast<std::size_t>(s.shape[0]) * s.shape[1] * s.shape[2];
  Buffers buf(values.size(), nc);
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = std::make_unique<Plan>(
        fftw_plan_dft_r2c(lattice.dimension(), lattice.shape.data(), buf.real, buf.complex, FFTW_ESTIMATE));
  }
  std::memcpy(buf.real, values.data(), values.size() * sizeof(double));
  plan->execute();
  s.data.resize(nc);
  for (std::size_t i = 0; i < nc; ++i) s.data[i] = {buf.complex[i][0], buf.complex[i][1]};
  return s;
}

std::vector<double> inverse(const Spectrum& spectrum) {
  const Lattice& lattice = spectrum.lattice;
  const std::size_t n = lattice.size();
  Buffers buf(n, spectrum.size());
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = std::make_unique<Plan>(
        fftw_plan_dft_c2r(lattice.dimension(), lattice.shape.data(), buf.complex, buf.real, FFTW_ESTIMATE));
  }
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    buf.complex[i][0] = spectrum.data[i].real();
    buf.complex[i][1] = spectrum.data[i].imag();
  }
  plan->execute();
  std::vector<double> out(buf.real, buf.real + n);
  const double scale = 1.0 / static_cast<double>(n);
  for (double& v : out) v *= scale;
  return out;
}

Spectrum kernel_spectrum(const Lattice& lattice, const std::vector<std::array<int, 3>>& offsets,
                         const std::vector<double>& weights) {
  std::vector<double> grid(lattice.size(), 0.0);
  for (std::size_t o = 0; o < offsets.size(); ++o) grid[lattice.ravel(offsets[o])] += weights[o];
  return forward(lattice, grid);
}

}  // namespace spreadlab::fft
