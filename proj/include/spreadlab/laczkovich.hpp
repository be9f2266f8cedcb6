#pragma once

// Unions of lattice cubes and the counting argument that turns a bound on
// |nu(U) - m(U)| <= rho * area(boundary U) over unit-cube unions U into a
// bound on the discrepancy D(nu). All geometry is exact integer arithmetic.

#include "spreadlab/kernels.hpp"
#include "spreadlab/measure.hpp"

#include <array>
#include <cstdint>
#include <set>
#include <vector>

namespace spreadlab {

using Anchor = std::array<std::int64_t, 3>;

/// Cubes prod [a_k M, (a_k + 1) M] for a set of anchors a.
struct CubeUnion {
  int dimension = 2;
  std::int64_t edge = 1;
  std::set<Anchor> cubes;

  std::size_t count() const { return cubes.size(); }
  bool contains(const Anchor& a) const { return cubes.count(a) != 0; }
  Integer volume() const;
};

/// Number of cube faces not shared by two member cubes.
std::int64_t exposed_faces(const CubeUnion& u);
/// exposed_faces * M^{d-1}.
Integer boundary_area(const CubeUnion& u);

/// A finite union of closed boxes with rational corners (numerators over a
/// common denominator); points are degenerate boxes.
struct PointBoxSet {
  int dimension = 2;
  std::int64_t denominator = 1;
  struct Box {
    Anchor lo{0, 0, 0};
    Anchor hi{0, 0, 0};
  };
  std::vector<Box> boxes;

  void add_point(const Anchor& p) { boxes.push_back({p, p}); }
  void add_box(const Anchor& lo, const Anchor& hi) { boxes.push_back({lo, hi}); }
  /// Unit cubes [a, a+1] given by their anchors (denominator 1).
  static PointBoxSet from_unit_cubes(int dimension, const std::set<Anchor>& anchors);
};

struct CubeCover {
  CubeUnion a;  ///< edge-M cubes meeting V
  CubeUnion b;  ///< the threefold concentric enlargements of the cubes of A
};

CubeCover build_ab(const PointBoxSet& v, std::int64_t edge);

struct ClaimReport {
  Integer lhs_a;  ///< area of the boundary of A
  Integer lhs_b;  ///< area of the boundary of B
  Integer rhs;    ///< (2d / M) * volume(B \ A), an integer
  bool pass = false;
};

ClaimReport claim_check(const PointBoxSet& v, std::int64_t edge);

/// A seeded random V: points and boxes with coordinates over denominator
/// 4 inside the window [0, window * M]^d.
PointBoxSet random_point_box_set(int dimension, std::int64_t edge, std::uint64_t seed, int window = 6);

struct ClaimBatch {
  std::size_t count = 0;
  std::size_t failures = 0;
  /// Index of the first failing instance, if any.
  std::int64_t first_failure = -1;
};

/// Claim checks on `count` random sets; instance i uses seed (seed, i).
ClaimBatch claim_batch_serial(int dimension, std::int64_t edge, std::uint64_t seed, std::size_t count);
ClaimBatch claim_batch_omp(int dimension, std::int64_t edge, std::uint64_t seed, std::size_t count);
ClaimBatch claim_batch(int dimension, std::int64_t edge, std::uint64_t seed, std::size_t count,
                       Execution exec = Execution::kParallel);

/// Seed of instance `index` in a batch.
std::uint64_t instance_seed(std::uint64_t seed, std::size_t index);

/// Union of up to `max_boxes` random boxes of unit cubes inside [0, window)^d.
CubeUnion random_cube_union(int dimension, int window, std::uint64_t seed, int max_boxes = 20);

/// nu(U) for a union of closed cubes, counting the periodic images of the
/// atoms when nu lives on a torus.
Real measure_of(const AtomicMeasure& nu, const CubeUnion& u);

struct RhoEstimate {
  double rho_hat = 1.0;  ///< max(1, raw)
  double raw = 0.0;      ///< max over the family of |nu(U) - m(U)| / area
  std::size_t worst = 0;
};

/// Lower estimate of the best rho: the family is only a sample of all unions.
RhoEstimate rho_upper_bound(const AtomicMeasure& nu, const std::vector<CubeUnion>& family);

/// Proven rho for a Z^d lattice whose points move by less than 1/2 in sup norm:
/// max(1, 2^{d-1}). Only lattice points on the boundary of U can change sides,
/// and there are at most 2^{d-1} of them per exposed unit face.
double rho_analytic_perturbed_lattice(int dimension, double delta);

/// C(d) = 9 d^{3/2}.
double laczkovich_constant(int dimension);
/// M = floor(2 rho d) + 1.
std::int64_t laczkovich_edge(double rho, int dimension);

struct ChainReplay {
  // V unit-cube union, A, B its cover at edge M.
  Real nu_v, nu_a, nu_b;
  Integer m_v, m_a, m_b, area_a, area_b;
  bool a_nu_v_le_nu_a = false;          // V inside A
  bool b_hypothesis_on_a = false;       // nu(A) <= m(A) + rho area(dA)
  bool c_claim_upper = false;           // m(A) + rho area(dA) <= m(B)
  bool d_b_inside_neighbourhood = false;  // B inside V_{+C rho}
  bool e_hypothesis_on_b = false;       // m(B) - rho area(dB) <= nu(B)
  bool f_claim_lower = false;           // m(V) <= m(A) <= m(B) - rho area(dB)
  bool upper_holds = false;             // nu(V) <= m(B) <= m(V_{+C rho})
  bool lower_holds = false;             // m(V) <= nu(B) <= nu(V_{+C rho})
};

ChainReplay replay_chain(const AtomicMeasure& nu, double rho, const CubeUnion& v);

struct PipelineResult {
  double rho = 1.0;
  std::int64_t edge = 1;
  double constant = 0.0;
  double bound = 0.0;  ///< C(d) * rho
  std::vector<ChainReplay> replays;
  bool chain_holds = true;
};

/// Bound on D(nu) with the chain replayed on `samples` random unit-cube
/// unions inside the domain window.
PipelineResult laczkovich_pipeline(const AtomicMeasure& nu, double rho, std::size_t samples = 50,
                                   std::uint64_t seed = 1);

}  // namespace spreadlab
