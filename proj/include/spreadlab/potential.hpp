#pragma once

// Transport bounds from a potential u with Laplacian u = nu - m.

#include "spreadlab/field.hpp"

#include <vector>

namespace spreadlab {

/// Constant of the upper-bound direction, Tra(nu) <= (1 + C(d)) Ra(v), with
/// C(d) = 9 d^{3/2} the cube-lemma constant.
double transport_upper_constant(int dimension);

/// Constant of the lower-bound direction, Ra~(v) <= (2 + (5/2)^d) Tra(nu),
/// for the dipole field assembled from an optimal coupling.
double transport_lower_constant(int dimension);

/// C_pot = d * (1 + 9 d^{3/2}): ||grad chi_1||_1 = d composed with the
/// upper-bound constant.
double potential_constant(int dimension);

struct PotentialBound {
  double bound = 0.0;
  double r_star = 0.0;
  double sup_u = 0.0;
  struct Sample {
    double r;
    double sup_single;  ///< ||u * chi_r||_inf
    double sup_triple;  ///< ||u * chi_r^{*3}||_inf
    double objective;   ///< r + sqrt(sup_single)
  };
  std::vector<Sample> samples;
  /// ||u * chi_r^{*3}|| <= ||u * chi_r|| at every sample (1e-12 relative).
  bool chain_holds = true;
};

/// r* = sqrt(||u||_inf), bound = (1 + C_pot) r*.
PotentialBound corollary1_bound(const ScalarGrid& u);

/// (1 + C_pot) * min over the sampled r of r + sqrt(||u * chi_r||_inf).
PotentialBound corollary2_bound(const ScalarGrid& u);

struct MollifierGradient {
  double measured = 0.0;  ///< discrete estimate of r ||grad chi_r||_1
  double exact = 0.0;     ///< d
};

/// r ||grad chi_r||_1 from the discrete ball volumes at r (1 - eta) and
/// r (1 + eta): surface / volume of the ball.
MollifierGradient mollifier_gradient_l1(const Lattice& lattice, double r, double eta = 0.05);

/// Largest Euclidean norm of the centred-difference gradient of u * chi_r.
double smoothed_gradient_sup(const ScalarGrid& u, double r);

}  // namespace spreadlab
