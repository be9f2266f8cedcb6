#pragma once

#include "spreadlab/transport.hpp"

#include <optional>
#include <span>

namespace spreadlab {

// For finite atomic measures the neighbourhood-domination conditions
//   nu1(B) <= nu2(B_{+r}),  nu2(B) <= nu1(B_{+r})
// only need checking on sets B made of atoms: shrinking B to its atoms leaves
// the left side unchanged and can only shrink B_{+r}. Neighbourhoods are closed.

struct DiCondition {
  bool holds = true;
  Real set_mass;
  Real neighborhood_mass;
};

/// Evaluates nu_side(C) <= nu_other(C_{+r}) for a set C of atoms of measure
/// `side` (1 or 2).
DiCondition check_di_condition(const AtomicMeasure& nu1, const AtomicMeasure& nu2, const Radius& r, int side,
                               std::span<const std::uint32_t> atoms);
DiCondition check_di_condition(const AtomicMeasure& nu1, const AtomicMeasure& nu2, const Relation& relation,
                               int side, std::span<const std::uint32_t> atoms);

enum class DiscrepancyMethod {
  kAuto,               ///< enumeration up to 12 atoms per side, cuts beyond
  kSubsetEnumeration,  ///< Hall conditions over every subset (<= 20 atoms per side)
  kCutCertificate,     ///< flow feasibility, violating sets from minimum cuts
};

struct DiscrepancyResult {
  Radius value;
  /// A violating set at the largest radius below `value` (the predecessor
  /// candidate, or 0). Empty when value is 0.
  std::optional<ViolatingSet> certificate_below;
  DiscrepancyMethod method = DiscrepancyMethod::kAuto;
  bool exact = false;
};

DiscrepancyResult discrepancy_distance(const AtomicMeasure& nu1, const AtomicMeasure& nu2,
                                       DiscrepancyMethod method = DiscrepancyMethod::kAuto);

struct DualityReport {
  Radius tra;
  Radius di;
  double gap = 0.0;
  bool exact = false;
  /// gap == 0 exactly in exact mode, |gap| <= 1e-9 otherwise.
  bool agree = false;
};

/// Transport via the flow search and discrepancy via subset enumeration
/// (<= 12 atoms per side) or cut certificates, computed independently.
DualityReport duality_check(const AtomicMeasure& nu1, const AtomicMeasure& nu2);

struct RelationDualityReport {
  bool tra_feasible = false;
  bool di_feasible = false;
  std::optional<ViolatingSet> violation;
};

/// Both sides of the duality for a fixed relation F: coupling existence via
/// flow, the domination conditions via subset enumeration (<= 20 atoms per side).
RelationDualityReport duality_check(const AtomicMeasure& nu1, const AtomicMeasure& nu2, const Relation& relation);

struct LebesgueDiscrepancy {
  double value = 0.0;
  /// h sqrt(d) / 2: the continuum discrepancy lies within value +- slack.
  double slack = 0.0;
  DiscrepancyResult raw;
};

/// Discrepancy against Lebesgue measure atomized at the cell centres of a
/// pitch-h lattice. The total mass of nu must match the domain volume within
/// 1e-6 relative; the cell masses are set to total / cells.
LebesgueDiscrepancy discrepancy_vs_lebesgue(const AtomicMeasure& nu, const Real& pitch);

}  // namespace spreadlab
