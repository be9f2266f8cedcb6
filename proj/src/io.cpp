#include "spreadlab/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace spreadlab::io {

namespace {

constexpr int kMaxDyadicExponent = 20;

bool is_power_of_two(const Integer& n) { return n > 0 && (n & (n - 1)) == 0; }

const json& field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw std::invalid_argument(std::string("missing JSON field '") + name + "'");
  return j.at(name);
}

}  // namespace

json to_json(const Real& x) {
  if (!x.is_exact()) {
    const double v = x.to_double();
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite number cannot be written to JSON");
    return v;
  }
  const Rational& r = x.rational();
  const Integer num = boost::multiprecision::numerator(r);
  const Integer den = boost::multiprecision::denominator(r);
  const Integer limit = Integer(1) << 53;
  if (den == 1 && abs(num) < limit) return num.convert_to<std::int64_t>();
  if (is_power_of_two(den) && den <= (Integer(1) << kMaxDyadicExponent) && abs(num) < limit) {
    return x.to_double();
  }
  return x.to_string();
}

Real real_from_json(const json& j) {
  if (j.is_number_integer()) return Real(j.get<std::int64_t>());
  if (j.is_number_float()) return Real::from_number(j.get<double>());
  if (j.is_string()) return Real::parse(j.get<std::string>());
  throw std::invalid_argument("expected a number or a \"p/q\" string, got " + j.dump());
}

json to_json(const Domain& domain) {
  return {{"kind", domain.is_torus() ? "torus" : "box"}, {"side", to_json(domain.side)}};
}

Domain domain_from_json(const json& j, int dimension) {
  const std::string kind = field(j, "kind").get<std::string>();
  Domain d;
  d.dimension = dimension;
  if (kind == "torus") {
    d.kind = DomainKind::kTorus;
  } else if (kind == "box") {
    d.kind = DomainKind::kBox;
  } else {
    throw std::invalid_argument("domain.kind must be \"torus\" or \"box\"");
  }
  d.side = real_from_json(field(j, "side"));
  d.validate();
  return d;
}

json to_json(const AtomicMeasure& nu) {
  json atoms = json::array();
  for (std::size_t i = 0; i < nu.size(); ++i) {
    json x = json::array();
    for (const Real& c : nu.position(i)) x.push_back(to_json(c));
    atoms.push_back({{"x", std::move(x)}, {"mass", to_json(nu.mass(i))}});
  }
  return {{"dimension", nu.dimension()}, {"domain", to_json(nu.domain())}, {"atoms", std::move(atoms)}};
}

bool has_grid(const json& j) { return j.is_object() && j.contains("grid"); }

Lattice lattice_from_json(const json& j) {
  const int d = field(j, "dimension").get<int>();
  Lattice l;
  l.domain = domain_from_json(field(j, "domain"), d);
  const json& shape = j.contains("grid") ? field(j.at("grid"), "shape") : field(j, "shape");
  if (!shape.is_array() || static_cast<int>(shape.size()) != d) throw std::invalid_argument("shape must list one cell count per axis");
  for (int k = 0; k < d; ++k) l.shape[static_cast<std::size_t>(k)] = shape.at(static_cast<std::size_t>(k)).get<int>();
  l.validate();
  return l;
}

AtomicMeasure measure_from_json(const json& j) {
  if (!j.contains("atoms") && has_grid(j)) return atomize(grid_measure_from_json(j));
  const int d = field(j, "dimension").get<int>();
  const Domain domain = domain_from_json(field(j, "domain"), d);
  std::vector<Real> coords;
  std::vector<Real> masses;
  for (const json& atom : field(j, "atoms")) {
    const json& x = field(atom, "x");
    if (!x.is_array() || static_cast<int>(x.size()) != d) throw std::invalid_argument("atom position has the wrong dimension");
    for (const json& c : x) coords.push_back(real_from_json(c));
    masses.push_back(real_from_json(field(atom, "mass")));
  }
  return AtomicMeasure(domain, std::move(coords), std::move(masses));
}

namespace {

json grid_json(const Lattice& l, const std::vector<double>& values) {
  json shape = json::array();
  for (int k = 0; k < l.dimension(); ++k) shape.push_back(l.shape[static_cast<std::size_t>(k)]);
  return {{"dimension", l.dimension()},
          {"domain", to_json(l.domain)},
          {"grid", {{"shape", std::move(shape)}, {"values", values}}}};
}

std::vector<double> grid_values(const json& j, const Lattice& l) {
  auto values = field(field(j, "grid"), "values").get<std::vector<double>>();
  if (values.size() != l.size()) throw std::invalid_argument("grid.values does not match grid.shape");
  return values;
}

}  // namespace

json to_json(const GridMeasure& mu) { return grid_json(mu.lattice, mu.cell_mass); }

GridMeasure grid_measure_from_json(const json& j) {
  GridMeasure mu(lattice_from_json(j));
  mu.cell_mass = grid_values(j, mu.lattice);
  return mu;
}

json to_json(const ScalarGrid& u) { return grid_json(u.lattice, u.values); }

ScalarGrid scalar_grid_from_json(const json& j) {
  ScalarGrid u(lattice_from_json(j));
  u.values = grid_values(j, u.lattice);
  return u;
}

json to_json(const GridField& v) {
  json shape = json::array();
  for (int k = 0; k < v.lattice.dimension(); ++k) shape.push_back(v.lattice.shape[static_cast<std::size_t>(k)]);
  return {{"dimension", v.lattice.dimension()},
          {"domain", to_json(v.lattice.domain)},
          {"shape", std::move(shape)},
          {"components", v.components}};
}

GridField field_from_json(const json& j) {
  GridField v(lattice_from_json(j));
  auto comps = field(j, "components").get<std::vector<std::vector<double>>>();
  if (comps.size() != v.components.size()) throw std::invalid_argument("field needs one component per axis");
  for (const auto& c : comps) {
    if (c.size() != v.lattice.size()) throw std::invalid_argument("field component does not match shape");
  }
  v.components = std::move(comps);
  return v;
}

json to_json(const Radius& r) {
  json out = {{"value", r.value}};
  if (r.squared) out["squared"] = to_json(Real(*r.squared));
  return out;
}

json to_json(const Coupling& coupling, std::optional<Radius> value, std::size_t candidates_probed) {
  json entries = json::array();
  for (const auto& e : coupling.entries) entries.push_back({e.source, e.target, to_json(e.weight)});
  json out = {{"entries", std::move(entries)},
              {"candidates_probed", candidates_probed},
              {"source", to_json(coupling.source)},
              {"target", to_json(coupling.target)}};
  out["value"] = value ? to_json(*value) : json(nullptr);
  return out;
}

Coupling coupling_from_json(const json& j) {
  Coupling c{measure_from_json(field(j, "source")), measure_from_json(field(j, "target")), {}};
  for (const json& e : field(j, "entries")) {
    if (!e.is_array() || e.size() != 3) throw std::invalid_argument("coupling entries are [i, j, weight] triples");
    const auto i = e.at(0).get<std::uint32_t>();
    const auto t = e.at(1).get<std::uint32_t>();
    if (i >= c.source.size() || t >= c.target.size()) throw std::invalid_argument("coupling entry index out of range");
    c.entries.push_back({i, t, real_from_json(e.at(2))});
  }
  return c;
}

json to_json(const ViolatingSet& v) {
  json out = {{"side", v.side},
              {"atoms", v.atoms},
              {"set_mass", to_json(v.set_mass)},
              {"neighborhood_mass", to_json(v.neighborhood_mass)}};
  out["radius"] = v.radius ? to_json(*v.radius) : json(nullptr);
  return out;
}

Relation relation_from_json(const json& j) {
  const auto rows = field(j, "rows").get<std::size_t>();
  const auto cols = field(j, "cols").get<std::size_t>();
  const json& admitted = field(j, "admitted");
  if (!admitted.is_array() || admitted.size() != rows) throw std::invalid_argument("admitted must have one row per source atom");
  std::vector<bool> m;
  m.reserve(rows * cols);
  for (const json& row : admitted) {
    if (!row.is_array() || row.size() != cols) throw std::invalid_argument("admitted rows must have one entry per target atom");
    for (const json& x : row) m.push_back(x.is_boolean() ? x.get<bool>() : x.get<int>() != 0);
  }
  return Relation::explicit_matrix(rows, cols, std::move(m));
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(1) << '\n';
  if (!out) throw std::runtime_error("error while writing " + path.string());
}

}  // namespace spreadlab::io
