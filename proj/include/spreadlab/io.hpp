#pragma once

// JSON formats.
//
// Numbers: integers and dyadic rationals with denominator <= 2^20 are written
// as JSON numbers and read back exactly; other exact rationals are written as
// "p/q" strings. Floats are written with shortest round-trip precision.
//
// Instance: {"dimension", "domain": {"kind", "side"}, "atoms": [{"x", "mass"}],
//            optional "grid": {"shape", "values"}} (grid values are cell masses,
//            or samples of a scalar function for potentials).
// Field:    {"dimension", "domain", "shape", "components": [[...] per axis]}.
// Coupling: {"value", "candidates_probed", "entries": [[i, j, w]], "source", "target"}.

#include "spreadlab/discrepancy.hpp"
#include "spreadlab/grid.hpp"
#include "spreadlab/transport.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>

namespace spreadlab::io {

using nlohmann::json;

json to_json(const Real& x);
Real real_from_json(const json& j);

json to_json(const Domain& domain);
Domain domain_from_json(const json& j, int dimension);

json to_json(const AtomicMeasure& nu);
AtomicMeasure measure_from_json(const json& j);

/// A measure given either by atoms or by a grid of cell masses (atomized at
/// the cell centres).
bool has_grid(const json& j);
Lattice lattice_from_json(const json& j);
json to_json(const GridMeasure& mu);
GridMeasure grid_measure_from_json(const json& j);
json to_json(const ScalarGrid& u);
ScalarGrid scalar_grid_from_json(const json& j);

json to_json(const GridField& v);
GridField field_from_json(const json& j);

json to_json(const Coupling& coupling, std::optional<Radius> value = std::nullopt, std::size_t candidates_probed = 0);
Coupling coupling_from_json(const json& j);

json to_json(const ViolatingSet& v);
json to_json(const Radius& r);

/// {"rows", "cols", "admitted": [[0|1, ...], ...]}
Relation relation_from_json(const json& j);

json read_json_file(const std::filesystem::path& path);
/// Throws std::runtime_error when the path cannot be written.
void write_json_file(const std::filesystem::path& path, const json& j);

}  // namespace spreadlab::io
