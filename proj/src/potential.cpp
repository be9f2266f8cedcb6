#include "spreadlab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spreadlab {

namespace {

void check_dimension(int d) {
  if (d < 1 || d > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
}

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

double transport_upper_constant(int dimension) {
  check_dimension(dimension);
  return 1.0 + 9.0 * std::pow(static_cast<double>(dimension), 1.5);
}

double transport_lower_constant(int dimension) {
  check_dimension(dimension);
  return 2.0 + std::pow(2.5, dimension);
}

double potential_constant(int dimension) { return dimension * transport_upper_constant(dimension); }

PotentialBound corollary1_bound(const ScalarGrid& u) {
  PotentialBound out;
  out.sup_u = u.sup_norm();
  out.r_star = std::sqrt(out.sup_u);
  out.bound = (1.0 + potential_constant(u.lattice.dimension())) * out.r_star;
  return out;
}

PotentialBound corollary2_bound(const ScalarGrid& u) {
  PotentialBound out;
  out.sup_u = u.sup_norm();
  double best = std::numeric_limits<double>::infinity();
  for (double r : ra_radii(u.lattice)) {
    PotentialBound::Sample s;
    s.r = r;
    s.sup_single = sup_abs(smooth(u, r, 1).values);
    s.sup_triple = sup_abs(smooth(u, r, 3).values);
    s.objective = r + std::sqrt(s.sup_single);
    // chi_r * chi_r is a probability kernel, so the extra smoothing cannot raise the sup.
    out.chain_holds = out.chain_holds && s.sup_triple <= s.sup_single * (1.0 + 1e-12) + 1e-300;
    if (s.objective < best) {
      best = s.objective;
      out.r_star = r;
    }
    out.samples.push_back(s);
  }
  out.bound = (1.0 + potential_constant(u.lattice.dimension())) * best;
  return out;
}

MollifierGradient mollifier_gradient_l1(const Lattice& lattice, double r, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("eta must lie in (0, 1)");
  const double inner = static_cast<double>(ball_stencil(lattice, r * (1.0 - eta)).offsets.size());
  const double outer = static_cast<double>(ball_stencil(lattice, r * (1.0 + eta)).offsets.size());
  const double mid = static_cast<double>(ball_stencil(lattice, r).offsets.size());
  // The gradient of chi_r is the surface measure of the sphere divided by the
  // ball volume; the shell count approximates the surface.
  MollifierGradient out;
  out.measured = (outer - inner) / (2.0 * eta * mid);
  out.exact = lattice.dimension();
  return out;
}

double smoothed_gradient_sup(const ScalarGrid& u, double r) {
  const GridField g = gradient(smooth(u, r, 1), DerivativeScheme::kCentered);
  return g.sup_norm();
}

}  // namespace spreadlab
