#include "spreadlab/discrepancy.hpp"

#include "spreadlab/kernels.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace spreadlab {

namespace {

constexpr std::size_t kEnumerationLimit = 12;

bool dominated(const Real& set_mass, const Real& nbhd_mass, const Real& total) {
  if (set_mass.is_exact() && nbhd_mass.is_exact()) return set_mass <= nbhd_mass;
  return set_mass.to_double() <= nbhd_mass.to_double() + 1e-9 * std::abs(total.to_double());
}

template <class Admits>
DiCondition evaluate(const AtomicMeasure& nu1, const AtomicMeasure& nu2, int side,
                     std::span<const std::uint32_t> atoms, Admits&& admits) {
  if (side != 1 && side != 2) throw std::invalid_argument("side must be 1 or 2");
  const AtomicMeasure& from = side == 1 ? nu1 : nu2;
  const AtomicMeasure& to = side == 1 ? nu2 : nu1;
  DiCondition out;
  for (auto i : atoms) {
    if (i >= from.size()) throw std::invalid_argument("atom index out of range");
    out.set_mass += from.mass(i);
  }
  for (std::size_t j = 0; j < to.size(); ++j) {
    for (auto i : atoms) {
      const bool linked = side == 1 ? admits(i, j) : admits(j, i);
      if (linked) {
        out.neighborhood_mass += to.mass(j);
        break;
      }
    }
  }
  out.holds = dominated(out.set_mass, out.neighborhood_mass, from.total_mass());
  return out;
}

}  // namespace

DiCondition check_di_condition(const AtomicMeasure& nu1, const AtomicMeasure& nu2, const Radius& r, int side,
                               std::span<const std::uint32_t> atoms) {
  return evaluate(nu1, nu2, side, atoms,
                  [&](std::size_t i, std::size_t j) { return compare_distance(nu1, i, nu2, j, r) <= 0; });
}

DiCondition check_di_condition(const AtomicMeasure& nu1, const AtomicMeasure& nu2, const Relation& relation,
                               int side, std::span<const std::uint32_t> atoms) {
  if (relation.is_radius()) return check_di_condition(nu1, nu2, relation.radius(), side, atoms);
  if (relation.rows() != nu1.size() || relation.cols() != nu2.size()) {
    throw std::invalid_argument("relation matrix does not match the atom counts");
  }
  return evaluate(nu1, nu2, side, atoms, [&](std::size_t i, std::size_t j) { return relation.admits(i, j); });
}

namespace {

struct Violation {
  int side = 1;
  std::vector<std::uint32_t> atoms;
};

// The two ways of deciding the domination conditions at threshold index k
// (pairs with rank <= k are neighbours; k = -1 means no pair is).
class ConditionOracle {
 public:
  ConditionOracle(const AtomicMeasure& nu1, const AtomicMeasure& nu2, const PairGeometry& geometry,
                  DiscrepancyMethod method)
      : nu1_(nu1), nu2_(nu2), geometry_(geometry), method_(method), caps_(detail::make_capacities(nu1, nu2)) {}

  std::optional<Violation> violation(std::ptrdiff_t k) const {
    return method_ == DiscrepancyMethod::kSubsetEnumeration ? enumerate(k) : cut(k);
  }

 private:
  bool linked(std::size_t i, std::size_t j, std::ptrdiff_t k) const {
    return static_cast<std::ptrdiff_t>(geometry_.rank(i, j)) <= k;
  }

  std::optional<Violation> enumerate(std::ptrdiff_t k) const {
    const std::size_t n1 = nu1_.size();
    const std::size_t n2 = nu2_.size();
    std::vector<std::uint32_t> masks1(n1, 0u);
    std::vector<std::uint32_t> masks2(n2, 0u);
    for (std::size_t i = 0; i < n1; ++i) {
      for (std::size_t j = 0; j < n2; ++j) {
        if (linked(i, j, k)) {
          masks1[i] |= 1u << j;
          masks2[j] |= 1u << i;
        }
      }
    }
    auto decode = [](int side, std::uint32_t mask) {
      Violation v;
      v.side = side;
      for (std::uint32_t b = 0; b < 32; ++b) {
        if (mask & (1u << b)) v.atoms.push_back(b);
      }
      return v;
    };
    std::optional<std::uint32_t> bad;
    if (caps_.exact) {
      bad = kernels::hall_violation_omp<std::int64_t>(masks1, caps_.source_int, caps_.target_int, 0);
      if (bad) return decode(1, *bad);
      bad = kernels::hall_violation_omp<std::int64_t>(masks2, caps_.target_int, caps_.source_int, 0);
      if (bad) return decode(2, *bad);
    } else {
      bad = kernels::hall_violation_omp<double>(masks1, caps_.source_float, caps_.target_float, caps_.tolerance);
      if (bad) return decode(1, *bad);
      bad = kernels::hall_violation_omp<double>(masks2, caps_.target_float, caps_.source_float, caps_.tolerance);
      if (bad) return decode(2, *bad);
    }
    return std::nullopt;
  }

  std::optional<Violation> cut(std::ptrdiff_t k) const {
    std::span<const PairGeometry::Pair> admitted;
    if (k >= 0) admitted = geometry_.pairs_within(static_cast<std::size_t>(k));
    auto r = detail::probe(caps_, nu1_.size(), nu2_.size(), admitted);
    if (r.feasible) return std::nullopt;
    return Violation{1, std::move(r.violating_source)};
  }

  const AtomicMeasure& nu1_;
  const AtomicMeasure& nu2_;
  const PairGeometry& geometry_;
  DiscrepancyMethod method_;
  detail::Capacities caps_;
};

}  // namespace

DiscrepancyResult discrepancy_distance(const AtomicMeasure& nu1, const AtomicMeasure& nu2,
                                       DiscrepancyMethod method) {
  detail::require_equal_mass(nu1, nu2);
  if (method == DiscrepancyMethod::kAuto) {
    method = nu1.size() <= kEnumerationLimit && nu2.size() <= kEnumerationLimit
                 ? DiscrepancyMethod::kSubsetEnumeration
                 : DiscrepancyMethod::kCutCertificate;
  }
  const PairGeometry geometry(nu1, nu2);
  const ConditionOracle oracle(nu1, nu2, geometry, method);
  const auto& candidates = geometry.candidates();

  // Smallest k at which no violation exists; the largest candidate always works.
  std::size_t lo = 0;
  std::size_t hi = candidates.size() - 1;
  std::ptrdiff_t largest_violated = -1;
  std::ptrdiff_t smallest_clean = static_cast<std::ptrdiff_t>(candidates.size());
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (oracle.violation(static_cast<std::ptrdiff_t>(mid))) {
      lo = mid + 1;
      largest_violated = std::max(largest_violated, static_cast<std::ptrdiff_t>(mid));
    } else {
      hi = mid;
      smallest_clean = std::min(smallest_clean, static_cast<std::ptrdiff_t>(mid));
    }
    if (largest_violated >= smallest_clean) throw std::logic_error("domination conditions are not monotone in r");
  }

  DiscrepancyResult out;
  out.method = method;
  out.exact = geometry.is_exact();
  out.value = candidates[lo];
  if (out.value.value == 0.0) return out;

  const auto below = static_cast<std::ptrdiff_t>(lo) - 1;
  auto v = oracle.violation(below);
  if (!v) throw std::logic_error("no violating set below the discrepancy value");
  Radius radius;
  if (below >= 0) {
    radius = candidates[static_cast<std::size_t>(below)];
  } else {
    radius.value = 0.0;
    if (geometry.is_exact()) radius.squared = Rational(0);
  }
  // Replay through the exact pair ranks: recomputing rational distances here
  // would dominate the run time on large instances.
  const DiCondition replay = evaluate(nu1, nu2, v->side, v->atoms, [&](std::size_t i, std::size_t j) {
    return below >= 0 && geometry.rank(i, j) <= static_cast<std::size_t>(below);
  });
  if (replay.holds) throw std::logic_error("violating set does not replay");
  ViolatingSet cert;
  cert.side = v->side;
  cert.atoms = std::move(v->atoms);
  cert.radius = radius;
  cert.set_mass = replay.set_mass;
  cert.neighborhood_mass = replay.neighborhood_mass;
  out.certificate_below = std::move(cert);
  return out;
}

DualityReport duality_check(const AtomicMeasure& nu1, const AtomicMeasure& nu2) {
  DualityReport report;
  const auto tra = bottleneck_distance(nu1, nu2);
  const auto di = discrepancy_distance(nu1, nu2, DiscrepancyMethod::kAuto);
  report.tra = tra.value;
  report.di = di.value;
  report.gap = tra.value.value - di.value.value;
  report.exact = tra.exact && di.exact;
  report.agree = report.exact ? same_radius(tra.value, di.value) : std::abs(report.gap) <= 1e-9;
  return report;
}

RelationDualityReport duality_check(const AtomicMeasure& nu1, const AtomicMeasure& nu2, const Relation& relation) {
  detail::require_equal_mass(nu1, nu2);
  RelationDualityReport report;
  const Certificate cert = feasible_coupling(nu1, nu2, relation);
  report.tra_feasible = std::holds_alternative<Coupling>(cert);

  const std::size_t n1 = nu1.size();
  const std::size_t n2 = nu2.size();
  if (n1 > 20 || n2 > 20) throw std::invalid_argument("relation duality check enumerates at most 20 atoms per side");
  std::vector<std::uint32_t> masks1(n1, 0u);
  std::vector<std::uint32_t> masks2(n2, 0u);
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      const bool linked = relation.is_radius() ? compare_distance(nu1, i, nu2, j, relation.radius()) <= 0
                                               : relation.admits(i, j);
      if (linked) {
        masks1[i] |= 1u << j;
        masks2[j] |= 1u << i;
      }
    }
  }
  const auto caps = detail::make_capacities(nu1, nu2);
  std::optional<std::uint32_t> bad;
  int side = 1;
  if (caps.exact) {
    bad = kernels::hall_violation_omp<std::int64_t>(masks1, caps.source_int, caps.target_int, 0);
    if (!bad) {
      side = 2;
      bad = kernels::hall_violation_omp<std::int64_t>(masks2, caps.target_int, caps.source_int, 0);
    }
  } else {
    bad = kernels::hall_violation_omp<double>(masks1, caps.source_float, caps.target_float, caps.tolerance);
    if (!bad) {
      side = 2;
      bad = kernels::hall_violation_omp<double>(masks2, caps.target_float, caps.source_float, caps.tolerance);
    }
  }
  report.di_feasible = !bad.has_value();
  if (bad) {
    ViolatingSet v;
    v.side = side;
    for (std::uint32_t b = 0; b < 32; ++b) {
      if (*bad & (1u << b)) v.atoms.push_back(b);
    }
    const auto replay = check_di_condition(nu1, nu2, relation, side, v.atoms);
    v.set_mass = replay.set_mass;
    v.neighborhood_mass = replay.neighborhood_mass;
    if (relation.is_radius()) v.radius = relation.radius();
    report.violation = std::move(v);
  }
  return report;
}

LebesgueDiscrepancy discrepancy_vs_lebesgue(const AtomicMeasure& nu, const Real& pitch) {
  const Domain& domain = nu.domain();
  const double volume = domain.volume();
  const double total = nu.total_mass().to_double();
  if (std::abs(total - volume) > 1e-6 * volume) {
    throw std::invalid_argument("measure is not mass-balanced: total " + nu.total_mass().to_string() +
                                " vs domain volume " + std::to_string(volume));
  }
  const AtomicMeasure lebesgue = lebesgue_atoms(domain, pitch, &nu.total_mass());
  LebesgueDiscrepancy out;
  out.raw = discrepancy_distance(nu, lebesgue, DiscrepancyMethod::kAuto);
  out.value = out.raw.value.value;
  out.slack = pitch.to_double() * std::sqrt(static_cast<double>(domain.dimension)) / 2.0;
  return out;
}

}  // namespace spreadlab
