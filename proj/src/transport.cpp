#include "spreadlab/transport.hpp"

#include "spreadlab/maxflow.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace spreadlab {

Relation Relation::within(const Radius& r) {
  if (r.value < 0.0) throw std::invalid_argument("relation radius must be nonnegative");
  Relation rel;
  rel.radius_ = r;
  return rel;
}

Relation Relation::explicit_matrix(std::size_t rows, std::size_t cols, std::vector<bool> admitted) {
  if (admitted.size() != rows * cols) throw std::invalid_argument("relation matrix has the wrong size");
  Relation rel;
  rel.rows_ = rows;
  rel.cols_ = cols;
  rel.matrix_ = std::move(admitted);
  return rel;
}

namespace {

std::string position_key(const AtomicMeasure& nu, std::size_t i) {
  std::string key;
  for (const Real& x : nu.position(i)) key += x.to_string() + ",";
  return key;
}

}  // namespace

void Relation::check_symmetric(const AtomicMeasure& source, const AtomicMeasure& target) const {
  if (is_radius()) return;
  if (rows_ != source.size() || cols_ != target.size()) {
    throw std::invalid_argument("relation matrix does not match the atom counts");
  }
  std::map<std::string, std::size_t> source_at;
  std::map<std::string, std::size_t> target_at;
  for (std::size_t i = 0; i < source.size(); ++i) source_at.emplace(position_key(source, i), i);
  for (std::size_t j = 0; j < target.size(); ++j) target_at.emplace(position_key(target, j), j);
  for (std::size_t i = 0; i < rows_; ++i) {
    auto ti = target_at.find(position_key(source, i));
    if (ti == target_at.end()) continue;
    for (std::size_t j = 0; j < cols_; ++j) {
      auto sj = source_at.find(position_key(target, j));
      if (sj == source_at.end()) continue;
      if (admits(i, j) != admits(sj->second, ti->second)) {
        throw std::invalid_argument("relation is not symmetric on shared support points");
      }
    }
  }
}

namespace detail {

void require_equal_mass(const AtomicMeasure& nu1, const AtomicMeasure& nu2) {
  if (nu1.empty() || nu2.empty()) throw std::invalid_argument("empty measure");
  const Real& a = nu1.total_mass();
  const Real& b = nu2.total_mass();
  if (a.is_exact() && b.is_exact()) {
    if (!(a == b)) {
      throw std::invalid_argument("total masses differ: " + a.to_string() + " vs " + b.to_string());
    }
    return;
  }
  const double x = a.to_double();
  const double y = b.to_double();
  if (std::abs(x - y) > 1e-9 * std::max(std::abs(x), std::abs(y))) {
    throw std::invalid_argument("total masses differ: " + a.to_string() + " vs " + b.to_string());
  }
}

Capacities make_capacities(const AtomicMeasure& nu1, const AtomicMeasure& nu2) {
  Capacities caps;
  if (nu1.has_exact_masses() && nu2.has_exact_masses()) {
    Integer lcm = 1;
    for (const auto* nu : {&nu1, &nu2}) {
      for (const Real& m : nu->masses()) lcm = boost::multiprecision::lcm(lcm, denominator(m.rational()));
    }
    const Integer limit = Integer(std::numeric_limits<std::int64_t>::max() / 4);
    Integer total = numerator(Rational(nu1.total_mass().rational() * lcm));
    if (total <= limit) {
      caps.exact = true;
      caps.unit = Rational(Integer(1), lcm);
      auto scale = [&lcm](const Real& m) { return numerator(Rational(m.rational() * lcm)).convert_to<std::int64_t>(); };
      for (const Real& m : nu1.masses()) caps.source_int.push_back(scale(m));
      for (const Real& m : nu2.masses()) caps.target_int.push_back(scale(m));
      caps.total_int = total.convert_to<std::int64_t>();
      return caps;
    }
  }
  for (const Real& m : nu1.masses()) caps.source_float.push_back(m.to_double());
  for (const Real& m : nu2.masses()) caps.target_float.push_back(m.to_double());
  caps.total_float = std::accumulate(caps.source_float.begin(), caps.source_float.end(), 0.0);
  caps.tolerance = 1e-9 * caps.total_float;
  return caps;
}

namespace {

template <class Cap>
ProbeResult run_probe(const std::vector<Cap>& source, const std::vector<Cap>& target, Cap total, Cap epsilon,
                      Cap tolerance, std::span<const PairGeometry::Pair> admitted,
                      const auto& to_weight) {
  const int rows = static_cast<int>(source.size());
  const int cols = static_cast<int>(target.size());
  const int s = rows + cols;
  const int t = s + 1;
  MaxFlow<Cap> flow(rows + cols + 2, epsilon);
  for (int i = 0; i < rows; ++i) flow.add_edge(s, i, source[static_cast<std::size_t>(i)]);
  for (int j = 0; j < cols; ++j) flow.add_edge(rows + j, t, target[static_cast<std::size_t>(j)]);
  std::vector<int> middle;
  middle.reserve(admitted.size());
  for (const auto& p : admitted) {
    middle.push_back(flow.add_edge(static_cast<int>(p.source), rows + static_cast<int>(p.target), total));
  }
  const Cap value = flow.solve(s, t);
  ProbeResult out;
  out.feasible = value >= total - tolerance;
  if (out.feasible) {
    for (std::size_t e = 0; e < middle.size(); ++e) {
      const Cap f = flow.flow(middle[e]);
      if (f > epsilon) out.entries.push_back({admitted[e].source, admitted[e].target, to_weight(f)});
    }
  } else {
    const auto reach = flow.source_side(s);
    for (int i = 0; i < rows; ++i) {
      if (reach[static_cast<std::size_t>(i)]) out.violating_source.push_back(static_cast<std::uint32_t>(i));
    }
  }
  return out;
}

}  // namespace

ProbeResult probe(const Capacities& caps, std::size_t rows, std::size_t cols,
                  std::span<const PairGeometry::Pair> admitted) {
  (void)rows;
  (void)cols;
  if (caps.exact) {
    return run_probe<std::int64_t>(caps.source_int, caps.target_int, caps.total_int, 0, 0, admitted,
                                   [&caps](std::int64_t f) { return Real(Rational(caps.unit * f)); });
  }
  return run_probe<double>(caps.source_float, caps.target_float, caps.total_float, 1e-12 * caps.total_float,
                           caps.tolerance, admitted, [](double f) { return Real(f); });
}

}  // namespace detail

namespace {

ViolatingSet make_violating_set(const AtomicMeasure& nu1, const AtomicMeasure& nu2,
                                std::vector<std::uint32_t> atoms, std::span<const PairGeometry::Pair> admitted) {
  ViolatingSet v;
  v.side = 1;
  std::vector<bool> in_c(nu1.size(), false);
  for (auto i : atoms) in_c[i] = true;
  std::vector<bool> in_nbhd(nu2.size(), false);
  for (const auto& p : admitted) {
    if (in_c[p.source]) in_nbhd[p.target] = true;
  }
  Real set_mass(0);
  for (auto i : atoms) set_mass += nu1.mass(i);
  Real nbhd_mass(0);
  for (std::size_t j = 0; j < nu2.size(); ++j) {
    if (in_nbhd[j]) nbhd_mass += nu2.mass(j);
  }
  v.atoms = std::move(atoms);
  v.set_mass = set_mass;
  v.neighborhood_mass = nbhd_mass;
  return v;
}

}  // namespace

Certificate feasible_coupling(const AtomicMeasure& nu1, const AtomicMeasure& nu2, const Relation& relation) {
  detail::require_equal_mass(nu1, nu2);
  const auto caps = detail::make_capacities(nu1, nu2);
  std::vector<PairGeometry::Pair> explicit_pairs;
  std::span<const PairGeometry::Pair> admitted;
  std::optional<PairGeometry> geometry;
  if (relation.is_radius()) {
    geometry.emplace(nu1, nu2);
    const auto k = geometry->threshold_index(relation.radius());
    if (k >= 0) admitted = geometry->pairs_within(static_cast<std::size_t>(k));
  } else {
    relation.check_symmetric(nu1, nu2);
    for (std::size_t i = 0; i < nu1.size(); ++i) {
      for (std::size_t j = 0; j < nu2.size(); ++j) {
        if (relation.admits(i, j)) {
          explicit_pairs.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
        }
      }
    }
    admitted = explicit_pairs;
  }
  auto result = detail::probe(caps, nu1.size(), nu2.size(), admitted);
  if (result.feasible) return Coupling{nu1, nu2, std::move(result.entries)};
  ViolatingSet v = make_violating_set(nu1, nu2, std::move(result.violating_source), admitted);
  if (relation.is_radius()) v.radius = relation.radius();
  return v;
}

BottleneckResult bottleneck_distance(const AtomicMeasure& nu1, const AtomicMeasure& nu2) {
  detail::require_equal_mass(nu1, nu2);
  const PairGeometry geometry(nu1, nu2);
  const auto caps = detail::make_capacities(nu1, nu2);
  const std::size_t count = geometry.candidates().size();

  std::size_t lo = 0;
  std::size_t hi = count - 1;
  std::optional<detail::ProbeResult> best;
  std::size_t best_index = count;
  std::ptrdiff_t largest_infeasible = -1;
  std::size_t probes = 0;
  auto check_monotone = [&]() {
    if (best && static_cast<std::ptrdiff_t>(best_index) <= largest_infeasible) {
      throw std::logic_error("feasibility is not monotone in the radius");
    }
  };
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    auto r = detail::probe(caps, nu1.size(), nu2.size(), geometry.pairs_within(mid));
    ++probes;
    if (r.feasible) {
      hi = mid;
      best = std::move(r);
      best_index = mid;
    } else {
      lo = mid + 1;
      largest_infeasible = std::max(largest_infeasible, static_cast<std::ptrdiff_t>(mid));
    }
    check_monotone();
  }
  if (!best || best_index != lo) {
    auto r = detail::probe(caps, nu1.size(), nu2.size(), geometry.pairs_within(lo));
    ++probes;
    if (!r.feasible) throw std::logic_error("no feasible coupling at the largest pairwise distance");
    best = std::move(r);
    best_index = lo;
    check_monotone();
  }
  BottleneckResult out;
  out.value = geometry.candidates()[lo];
  out.witness = Coupling{nu1, nu2, std::move(best->entries)};
  out.candidates_probed = probes;
  out.exact = geometry.is_exact();
  return out;
}

Radius brute_force_bottleneck(const AtomicMeasure& nu1, const AtomicMeasure& nu2) {
  const std::size_t n = nu1.size();
  if (n != nu2.size()) throw std::invalid_argument("brute force needs equal atom counts");
  if (n == 0) throw std::invalid_argument("empty measure");
  if (n > 9) throw std::invalid_argument("brute force is limited to 9 atoms per side");
  for (const auto* nu : {&nu1, &nu2}) {
    for (const Real& m : nu->masses()) {
      if (!(m == Real(1))) throw std::invalid_argument("brute force needs unit masses");
    }
  }
  const PairGeometry geometry(nu1, nu2);
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
  do {
    std::uint32_t worst = 0;
    for (std::size_t i = 0; i < n && worst < best; ++i) worst = std::max(worst, geometry.rank(i, perm[i]));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return geometry.candidates()[best];
}

MarriageResult marriage_bijection(const AtomicMeasure& x) {
  const Domain& domain = x.domain();
  if (!domain.is_torus()) throw std::invalid_argument("marriage_bijection needs a torus window");
  const std::int64_t side = floor_to_int(domain.side);
  if (!(domain.side == Real(side))) throw std::invalid_argument("window side must be an integer");
  for (const Real& m : x.masses()) {
    if (!(m == Real(1))) throw std::invalid_argument("marriage_bijection needs unit masses");
  }
  InstanceParams lattice_params;
  lattice_params.kind = InstanceKind::kPerturbedLattice;
  lattice_params.dimension = domain.dimension;
  lattice_params.side = domain.side;
  lattice_params.delta = 0.0;
  const AtomicMeasure lattice = generate_instance(lattice_params, 0);
  if (lattice.size() != x.size()) {
    throw std::invalid_argument("atom count " + std::to_string(x.size()) + " differs from the " +
                                std::to_string(lattice.size()) + " lattice points in the window");
  }
  const auto result = bottleneck_distance(lattice, x);
  MarriageResult out;
  out.map.assign(lattice.size(), std::numeric_limits<std::uint32_t>::max());
  for (const auto& e : result.witness.entries) {
    if (!(e.weight == Real(1))) throw std::logic_error("bottleneck flow is not integral");
    out.map[e.source] = e.target;
  }
  out.sup_displacement = result.value.value;
  return out;
}

CouplingReport verify_coupling(const Coupling& coupling) {
  CouplingReport report;
  std::vector<Real> rows(coupling.source.size(), Real(0));
  std::vector<Real> cols(coupling.target.size(), Real(0));
  for (const auto& e : coupling.entries) {
    if (e.source >= rows.size() || e.target >= cols.size()) throw std::invalid_argument("coupling index out of range");
    if (!(e.weight > Real(0))) report.nonnegative = false;
    rows[e.source] += e.weight;
    cols[e.target] += e.weight;
    report.support_radius = std::max(
        report.support_radius,
        distance(coupling.source.domain(), coupling.source.position_approx(e.source),
                 coupling.target.position_approx(e.target)));
  }
  for (std::size_t i = 0; i < rows.size(); ++i) report.marginal_error_1 += abs(rows[i] - coupling.source.mass(i));
  for (std::size_t j = 0; j < cols.size(); ++j) report.marginal_error_2 += abs(cols[j] - coupling.target.mass(j));
  return report;
}

}  // namespace spreadlab
