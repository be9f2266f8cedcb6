#pragma once

#include "spreadlab/measure.hpp"
#include "spreadlab/pair_geometry.hpp"

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

namespace spreadlab {

/// Sparse nonnegative weights on (source atom, target atom) pairs.
struct Coupling {
  struct Entry {
    std::uint32_t source;
    std::uint32_t target;
    Real weight;
  };
  AtomicMeasure source;
  AtomicMeasure target;
  std::vector<Entry> entries;
};

/// Atoms C of one measure whose mass exceeds the mass the other measure puts
/// on the neighbourhood C_{+F}. `side` 1 means C is a set of source atoms.
struct ViolatingSet {
  int side = 1;
  std::vector<std::uint32_t> atoms;
  /// The radius of F_r, or nullopt for an explicit relation.
  std::optional<Radius> radius;
  Real set_mass;
  Real neighborhood_mass;
};

using Certificate = std::variant<Coupling, ViolatingSet>;

/// Either F_r = {|x - y| <= r} or an explicit boolean matrix over
/// source atoms x target atoms.
class Relation {
 public:
  static Relation within(const Radius& r);
  static Relation within(const Real& r) { return within(Radius::from_real(r)); }
  static Relation explicit_matrix(std::size_t rows, std::size_t cols, std::vector<bool> admitted);

  bool is_radius() const { return radius_.has_value(); }
  const Radius& radius() const { return *radius_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool admits(std::size_t i, std::size_t j) const { return matrix_[i * cols_ + j]; }

  /// Throws unless the explicit matrix is symmetric across atoms the two
  /// measures share: if source i sits where target j' sits and target j
  /// where source i' sits, then F(i, j) == F(i', j').
  void check_symmetric(const AtomicMeasure& source, const AtomicMeasure& target) const;

 private:
  std::optional<Radius> radius_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<bool> matrix_;
};

/// A coupling supported in F, or a violating set extracted from a minimum cut.
Certificate feasible_coupling(const AtomicMeasure& nu1, const AtomicMeasure& nu2, const Relation& relation);

struct BottleneckResult {
  Radius value;
  Coupling witness;
  std::size_t candidates_probed = 0;
  bool exact = false;
};

/// L-infinity transport distance: the smallest pairwise distance r for which
/// a coupling supported in F_r exists, found by binary search over the
/// sorted pairwise distances with the flow probe.
BottleneckResult bottleneck_distance(const AtomicMeasure& nu1, const AtomicMeasure& nu2);

/// Minimum over all bijections of the largest pair distance. Unit masses,
/// equal counts, at most 9 atoms per side.
Radius brute_force_bottleneck(const AtomicMeasure& nu1, const AtomicMeasure& nu2);

struct MarriageResult {
  /// lattice point index (row-major over Z^d in the window) -> atom index
  std::vector<std::uint32_t> map;
  double sup_displacement = 0.0;
};

/// Bottleneck bijection between the lattice points of the torus window
/// [0, L)^d (L integer) and the unit-mass atoms of X.
MarriageResult marriage_bijection(const AtomicMeasure& x);

struct CouplingReport {
  Real marginal_error_1;
  Real marginal_error_2;
  double support_radius = 0.0;
  bool nonnegative = true;
};

/// Total-variation marginal errors and the largest pair distance in the support.
CouplingReport verify_coupling(const Coupling& coupling);

namespace detail {

/// Masses of both measures as integer capacities over a common denominator,
/// or as doubles when some mass is not exact.
struct Capacities {
  bool exact = false;
  Rational unit = 1;  // one integer capacity unit equals this much mass
  std::vector<std::int64_t> source_int;
  std::vector<std::int64_t> target_int;
  std::int64_t total_int = 0;
  std::vector<double> source_float;
  std::vector<double> target_float;
  double total_float = 0.0;
  double tolerance = 0.0;
};

Capacities make_capacities(const AtomicMeasure& nu1, const AtomicMeasure& nu2);

/// Throws unless total masses agree (exactly, or within 1e-9 relative).
void require_equal_mass(const AtomicMeasure& nu1, const AtomicMeasure& nu2);

struct ProbeResult {
  bool feasible = false;
  std::vector<Coupling::Entry> entries;        // when feasible
  std::vector<std::uint32_t> violating_source;  // when infeasible
};

ProbeResult probe(const Capacities& caps, std::size_t rows, std::size_t cols,
                  std::span<const PairGeometry::Pair> admitted);

}  // namespace detail

}  // namespace spreadlab
