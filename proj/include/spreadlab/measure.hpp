#pragma once

#include "spreadlab/real.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace spreadlab {

enum class DomainKind { kTorus, kBox };

/// The cube [0, side)^d, either periodic (torus) or with hard walls (box).
struct Domain {
  int dimension = 1;
  DomainKind kind = DomainKind::kTorus;
  Real side = Real(1);

  static Domain torus(int d, Real side) { return {d, DomainKind::kTorus, std::move(side)}; }
  static Domain box(int d, Real side) { return {d, DomainKind::kBox, std::move(side)}; }

  void validate() const;
  double volume() const;
  /// Largest possible distance between two points of the domain.
  double diameter() const;
  bool is_torus() const { return kind == DomainKind::kTorus; }
};

bool operator==(const Domain& a, const Domain& b);

/// Euclidean distance, taking the minimal image on the torus.
double distance(const Domain& domain, std::span<const double> a, std::span<const double> b);

/// Exact squared distance; both points and the side must be exact.
Rational squared_distance(const Domain& domain, std::span<const Real> a, std::span<const Real> b);

/// Finitely many weighted points in a domain. Immutable and cheap to copy.
class AtomicMeasure {
 public:
  AtomicMeasure() = default;
  /// `coordinates` is row-major (atom-major): size() * dimension entries.
  AtomicMeasure(Domain domain, std::vector<Real> coordinates, std::vector<Real> masses);

  const Domain& domain() const { return data_->domain; }
  int dimension() const { return data_->domain.dimension; }
  std::size_t size() const { return data_ ? data_->masses.size() : 0; }
  bool empty() const { return size() == 0; }

  std::span<const Real> position(std::size_t i) const;
  std::span<const double> position_approx(std::size_t i) const;
  const Real& mass(std::size_t i) const { return data_->masses[i]; }
  std::span<const Real> masses() const { return data_->masses; }
  std::span<const Real> coordinates() const { return data_->coordinates; }

  const Real& total_mass() const { return data_->total; }
  bool has_exact_positions() const { return data_->exact_positions; }
  bool has_exact_masses() const { return data_->exact_masses; }

 private:
  struct Data {
    Domain domain;
    std::vector<Real> coordinates;
    std::vector<double> approx;
    std::vector<Real> masses;
    Real total;
    bool exact_positions = true;
    bool exact_masses = true;
  };
  std::shared_ptr<const Data> data_;
};

/// How the scaling action treats masses.
enum class MassScaling {
  kPreserve,  ///< nu_t(B) = nu(tB): masses unchanged, the pushforward under x -> x/t
  kLebesgue,  ///< nu_t(B) = t^-d nu(tB): masses times t^-d, so Lebesgue measure is fixed
};

/// Sends each atom x to x/t and the domain side L to L/t.
AtomicMeasure scale_measure(const AtomicMeasure& nu, const Real& t,
                            MassScaling mode = MassScaling::kPreserve);

/// Unit-mass atoms at the cell centres of a pitch-h lattice, i.e. Lebesgue
/// measure atomized at cell centres. `side / pitch` must be an integer.
/// When `total` is given, the common cell mass is total / cells instead of h^d.
AtomicMeasure lebesgue_atoms(const Domain& domain, const Real& pitch,
                             const Real* total = nullptr);

/// A sub-measure restricted to the listed atoms.
AtomicMeasure restrict_to(const AtomicMeasure& nu, std::span<const std::uint32_t> atoms);

// ---------------------------------------------------------------------------
// Instance generators.

enum class InstanceKind { kPerturbedLattice, kPoissonProcess, kCluster, kBallUniform };

InstanceKind parse_instance_kind(const std::string& name);
std::string to_string(InstanceKind kind);

struct InstanceParams {
  InstanceKind kind = InstanceKind::kPerturbedLattice;
  int dimension = 2;
  Real side = Real(16);
  DomainKind domain = DomainKind::kTorus;
  /// perturbed_lattice: sup-norm bound on the i.i.d. displacements, in [0, 1/2).
  double delta = 0.0;
  /// poisson_process / cluster: fixed atom count (0 = draw Poisson(intensity * volume)).
  int count = 0;
  double intensity = 1.0;
  /// cluster: number of parents and the Gaussian spread of children.
  int clusters = 4;
  double spread = 0.5;
  /// ball_uniform: centre, radius and lattice pitch of the discretized ball.
  std::vector<double> center;
  double radius = 1.0;
  Real pitch = Real::exact(1, 16);
  /// When positive, random coordinates are rounded to multiples of 1/denominator
  /// so the instance is exact.
  std::int64_t denominator = 0;
};

/// Deterministic in (params, seed). Throws std::invalid_argument naming the
/// offending field when the parameters are invalid.
AtomicMeasure generate_instance(const InstanceParams& params, std::uint64_t seed);

}  // namespace spreadlab
