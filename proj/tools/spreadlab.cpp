// spreadlab: command-line front end.
//
// Exit codes: 0 success, 1 a checked property failed, 2 usage or input error.

#include "spreadlab/discrepancy.hpp"
#include "spreadlab/field.hpp"
#include "spreadlab/io.hpp"
#include "spreadlab/kernels.hpp"
#include "spreadlab/laczkovich.hpp"
#include "spreadlab/potential.hpp"
#include "spreadlab/suite.hpp"
#include "spreadlab/transport.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

using namespace spreadlab;
using io::json;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct Globals {
  std::uint64_t seed = 1;
  double tol = 1e-9;
  std::string pitch;
  std::string json_out;
  std::string csv_out;
};

// Prints the result and mirrors it to --json-out / --csv-out (one flat row of
// the scalar fields).
void emit(const Globals& g, const json& result) {
  std::cout << result.dump(1) << '\n';
  if (!g.json_out.empty()) io::write_json_file(g.json_out, result);
  if (!g.csv_out.empty()) {
    Table t;
    std::vector<std::string> row;
    for (const auto& [key, value] : result.items()) {
      if (value.is_primitive()) {
        t.columns.push_back(key);
        row.push_back(value.is_string() ? value.get<std::string>() : value.dump());
      }
    }
    t.rows.push_back(std::move(row));
    std::ofstream out(g.csv_out);
    if (!out) throw std::runtime_error("cannot write " + g.csv_out);
    out << to_csv(t);
  }
}

AtomicMeasure load_measure(const std::string& path) { return io::measure_from_json(io::read_json_file(path)); }

Lattice lattice_for(const json& instance, const Domain& domain, const Globals& g, int cells) {
  if (io::has_grid(instance)) return io::lattice_from_json(instance);
  if (!g.pitch.empty()) return Lattice::with_pitch(domain, Real::parse(g.pitch).to_double());
  return Lattice::cubic(domain, cells);
}

std::optional<Relation> relation_from_flags(const std::string& radius, const std::string& file) {
  if (!file.empty()) return io::relation_from_json(io::read_json_file(file));
  if (!radius.empty()) return Relation::within(Real::parse(radius));
  return std::nullopt;
}

json certificate_json(const Certificate& c) {
  if (const auto* coupling = std::get_if<Coupling>(&c)) {
    return {{"feasible", true}, {"coupling", io::to_json(*coupling)}};
  }
  return {{"feasible", false}, {"violating_set", io::to_json(std::get<ViolatingSet>(c))}};
}

DiscrepancyMethod parse_method(const std::string& m) {
  if (m == "auto") return DiscrepancyMethod::kAuto;
  if (m == "enumeration") return DiscrepancyMethod::kSubsetEnumeration;
  if (m == "cut") return DiscrepancyMethod::kCutCertificate;
  throw std::invalid_argument("method must be auto, enumeration or cut");
}

std::pair<int, int> parse_sizes(const std::string& s) {
  const auto dots = s.find("..");
  try {
    if (dots == std::string::npos) {
      const int n = std::stoi(s);
      return {n, n};
    }
    return {std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2))};
  } catch (const std::logic_error&) {
    throw std::invalid_argument("sizes must look like 4..8");
  }
}

json ra_json(const RaResult& r) {
  json samples = json::array();
  for (const auto& s : r.samples) samples.push_back({s.r, s.sup});
  return {{"value", r.value}, {"argmin_r", r.argmin_r}, {"samples", std::move(samples)}};
}

json bound_json(const PotentialBound& b) {
  json samples = json::array();
  for (const auto& s : b.samples) {
    samples.push_back({{"r", s.r}, {"sup_single", s.sup_single}, {"sup_triple", s.sup_triple}, {"objective", s.objective}});
  }
  return {{"bound", b.bound},       {"r_star", b.r_star},          {"sup_u", b.sup_u},
          {"chain_holds", b.chain_holds}, {"samples", std::move(samples)}};
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_limit_from_env();
  CLI::App app{"Uniform spreading: transport, discrepancy, connecting fields"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "seed for every random choice");
  app.add_option("--tol", g.tol, "tolerance for float-mode comparisons");
  app.add_option("--pitch", g.pitch, "grid pitch (e.g. 0.125 or 1/8)");
  app.add_option("--json-out", g.json_out, "also write the JSON result here");
  app.add_option("--csv-out", g.csv_out, "also write a CSV here");
  int code = kPass;

  // gen
  auto* gen = app.add_subcommand("gen", "generate an instance")->fallthrough();
  std::string kind = "perturbed_lattice";
  std::string domain_kind = "torus";
  std::string side = "16";
  std::string gen_pitch;
  std::string output;
  InstanceParams params;
  gen->add_option("--kind", kind, "perturbed_lattice | poisson_process | cluster | ball_uniform");
  gen->add_option("--delta", params.delta);
  gen->add_option("--side", side);
  gen->add_option("--dim", params.dimension);
  gen->add_option("--domain", domain_kind, "torus | box");
  gen->add_option("--count", params.count);
  gen->add_option("--intensity", params.intensity);
  gen->add_option("--clusters", params.clusters);
  gen->add_option("--spread", params.spread);
  gen->add_option("--center", params.center);
  gen->add_option("--radius", params.radius);
  gen->add_option("--denominator", params.denominator, "round coordinates to multiples of 1/q");
  gen->add_option("-o,--output", output, "output file (stdout when omitted)");
  gen->callback([&] {
    params.kind = parse_instance_kind(kind);
    params.side = Real::parse(side);
    if (domain_kind != "torus" && domain_kind != "box") throw std::invalid_argument("domain must be torus or box");
    params.domain = domain_kind == "torus" ? DomainKind::kTorus : DomainKind::kBox;
    if (!g.pitch.empty()) params.pitch = Real::parse(g.pitch);
    const json j = io::to_json(generate_instance(params, g.seed));
    if (output.empty()) {
      std::cout << j.dump(1) << '\n';
    } else {
      io::write_json_file(output, j);
    }
  });

  // tra
  auto* tra = app.add_subcommand("tra", "L-infinity transport distance")->fallthrough();
  std::string a_path;
  std::string b_path;
  std::string relation_radius;
  std::string relation_file;
  std::string witness_path;
  tra->add_option("a", a_path)->required();
  tra->add_option("b", b_path)->required();
  tra->add_option("--relation", relation_radius, "feasibility at radius r instead of the distance");
  tra->add_option("--relation-file", relation_file, "explicit relation matrix");
  tra->add_option("--witness", witness_path, "write the coupling here");
  tra->callback([&] {
    const AtomicMeasure a = load_measure(a_path);
    const AtomicMeasure b = load_measure(b_path);
    if (auto rel = relation_from_flags(relation_radius, relation_file)) {
      rel->check_symmetric(a, b);
      const Certificate c = feasible_coupling(a, b, *rel);
      if (!witness_path.empty()) io::write_json_file(witness_path, certificate_json(c));
      emit(g, certificate_json(c));
      return;
    }
    const BottleneckResult r = bottleneck_distance(a, b);
    if (!witness_path.empty()) io::write_json_file(witness_path, io::to_json(r.witness, r.value, r.candidates_probed));
    emit(g, {{"value", r.value.value},
             {"radius", io::to_json(r.value)},
             {"exact", r.exact},
             {"candidates_probed", r.candidates_probed}});
  });

  // di
  auto* di = app.add_subcommand("di", "discrepancy distance with certificate")->fallthrough();
  std::string cert_path;
  std::string method = "auto";
  di->add_option("a", a_path)->required();
  di->add_option("b", b_path)->required();
  di->add_option("--certificate", cert_path, "write the violating set below the value here");
  di->add_option("--method", method, "auto | enumeration | cut");
  di->callback([&] {
    const DiscrepancyResult r = discrepancy_distance(load_measure(a_path), load_measure(b_path), parse_method(method));
    const json cert = r.certificate_below ? io::to_json(*r.certificate_below) : json(nullptr);
    if (!cert_path.empty()) io::write_json_file(cert_path, cert);
    emit(g, {{"value", r.value.value}, {"radius", io::to_json(r.value)}, {"exact", r.exact}, {"certificate", cert}});
  });

  // dual-check
  auto* dual = app.add_subcommand("dual-check", "compare Tra and Di computed independently")->fallthrough();
  dual->add_option("a", a_path)->required();
  dual->add_option("b", b_path)->required();
  dual->add_option("--relation", relation_radius);
  dual->add_option("--relation-file", relation_file);
  dual->callback([&] {
    const AtomicMeasure a = load_measure(a_path);
    const AtomicMeasure b = load_measure(b_path);
    if (auto rel = relation_from_flags(relation_radius, relation_file)) {
      rel->check_symmetric(a, b);
      const auto r = duality_check(a, b, *rel);
      const bool ok = r.tra_feasible == r.di_feasible;
      emit(g, {{"tra_feasible", r.tra_feasible},
               {"di_feasible", r.di_feasible},
               {"violation", r.violation ? io::to_json(*r.violation) : json(nullptr)},
               {"pass", ok}});
      if (!ok) code = kFail;
      return;
    }
    const auto r = duality_check(a, b);
    const bool ok = r.exact ? r.agree : std::abs(r.gap) <= g.tol;
    emit(g, {{"tra", r.tra.value}, {"di", r.di.value}, {"gap", r.gap}, {"exact", r.exact}, {"pass", ok}});
    if (!ok) code = kFail;
  });

  // dvl
  auto* dvl = app.add_subcommand("dvl", "discrepancy against Lebesgue measure")->fallthrough();
  std::string inst_path;
  dvl->add_option("instance", inst_path)->required();
  dvl->callback([&] {
    if (g.pitch.empty()) throw std::invalid_argument("dvl needs --pitch");
    const auto r = discrepancy_vs_lebesgue(load_measure(inst_path), Real::parse(g.pitch));
    emit(g, {{"value", r.value}, {"discretization_slack", r.slack}, {"exact", r.raw.exact}});
  });

  // field
  auto* fieldcmd = app.add_subcommand("field", "connecting vector fields")->fallthrough();
  fieldcmd->require_subcommand(1);
  int cells = 64;
  std::string potential_out;
  auto* fpoisson = fieldcmd->add_subcommand("poisson", "Poisson connecting field of an instance")->fallthrough();
  fpoisson->add_option("instance", inst_path)->required();
  fpoisson->add_option("--cells", cells, "cells per axis when no --pitch is given");
  fpoisson->add_option("-o,--output", output, "field JSON");
  fpoisson->add_option("--potential", potential_out, "also write the potential u");
  fpoisson->callback([&] {
    const json inst = io::read_json_file(inst_path);
    GridMeasure mu = io::has_grid(inst) ? io::grid_measure_from_json(inst) : GridMeasure(Lattice::cubic(Domain{}, 2));
    if (!io::has_grid(inst)) {
      const AtomicMeasure nu = io::measure_from_json(inst);
      mu = deposit(nu, lattice_for(inst, nu.domain(), g, cells));
    }
    const PoissonSolution sol = poisson_connect(mu);
    const auto report = weak_divergence_report(sol.field, minus_lebesgue(mu), default_battery(mu.lattice.dimension(), mu.lattice.side(), g.seed));
    if (!output.empty()) io::write_json_file(output, io::to_json(sol.field));
    if (!potential_out.empty()) io::write_json_file(potential_out, io::to_json(sol.potential));
    emit(g, {{"max_residual", report.max_residual},
             {"sup_field", sol.field.sup_norm()},
             {"sup_potential", sol.potential.sup_norm()},
             {"pass", report.max_residual <= 1e-8}});
    if (report.max_residual > 1e-8) code = kFail;
  });
  std::string field_path;
  auto* fra = fieldcmd->add_subcommand("ra", "Ra and Ra~ of a field")->fallthrough();
  fra->add_option("field", field_path)->required();
  fra->callback([&] {
    const GridField v = io::field_from_json(io::read_json_file(field_path));
    const RaResult r = ra(v);
    const RaResult rt = ra_tilde(v);
    const bool ok = r.value <= rt.value * (1 + 1e-12) + 1e-15 && rt.value <= v.sup_norm() * (1 + 1e-12) + 1e-15;
    emit(g, {{"ra", ra_json(r)}, {"ra_tilde", ra_json(rt)}, {"sup_norm", v.sup_norm()}, {"chain_holds", ok}});
    if (!ok) code = kFail;
  });
  std::string coupling_path;
  double radius = 0.0;
  auto* fassemble = fieldcmd->add_subcommand("assemble", "dipole field of a coupling")->fallthrough();
  fassemble->add_option("coupling", coupling_path)->required();
  fassemble->add_option("--r", radius, "assembly radius (>= every pair distance)")->required();
  fassemble->add_option("--cells", cells, "cells per axis when no --pitch is given");
  fassemble->add_option("-o,--output", output, "field JSON");
  fassemble->callback([&] {
    const json cj = io::read_json_file(coupling_path);
    const Coupling c = io::coupling_from_json(cj.contains("coupling") ? cj.at("coupling") : cj);
    const Lattice lattice = lattice_for(json::object(), c.source.domain(), g, cells);
    const GridField v = assemble_transport_field(c, radius, lattice);
    if (!output.empty()) io::write_json_file(output, io::to_json(v));
    const RaResult rt = ra_tilde(v);
    emit(g, {{"l1_norm", v.l1_norm()}, {"sup_norm", v.sup_norm()}, {"ra_tilde", rt.value}, {"argmin_r", rt.argmin_r}});
  });

  // laczkovich
  auto* lac = app.add_subcommand("laczkovich", "cube-union lemma")->fallthrough();
  lac->require_subcommand(1);
  int dim = 2;
  std::int64_t edge = 5;
  std::size_t count = 1000;
  auto* claim = lac->add_subcommand("claim", "check the boundary/annulus claim on random sets")->fallthrough();
  claim->add_option("--dim", dim);
  claim->add_option("--M", edge);
  claim->add_option("--count", count);
  claim->callback([&] {
    const ClaimBatch b = claim_batch(dim, edge, g.seed, count);
    emit(g, {{"dim", dim}, {"M", edge}, {"count", b.count}, {"failures", b.failures}, {"first_failure", b.first_failure}});
    if (b.failures != 0) code = kFail;
  });
  double rho = 1.0;
  std::size_t samples = 50;
  auto* bound = lac->add_subcommand("bound", "bound on D(nu) from rho, with the chain replayed")->fallthrough();
  bound->add_option("instance", inst_path)->required();
  bound->add_option("--rho", rho)->required();
  bound->add_option("--samples", samples);
  bound->callback([&] {
    const AtomicMeasure nu = load_measure(inst_path);
    const PipelineResult p = laczkovich_pipeline(nu, rho, samples, g.seed);
    std::vector<CubeUnion> family;
    for (std::size_t i = 0; i < samples; ++i) {
      family.push_back(random_cube_union(nu.dimension(), std::max(1, static_cast<int>(nu.domain().side.to_double())),
                                         instance_seed(g.seed, 10000 + i)));
    }
    const RhoEstimate est = rho_upper_bound(nu, family);
    emit(g, {{"bound", p.bound},
             {"constant", p.constant},
             {"M", p.edge},
             {"rho", p.rho},
             {"rho_hat", est.rho_hat},
             {"rho_hat_raw", est.raw},
             {"chain_holds", p.chain_holds}});
    if (!p.chain_holds) code = kFail;
  });

  // potential
  auto* pot = app.add_subcommand("potential", "transport bounds from a potential")->fallthrough();
  pot->require_subcommand(1);
  std::string u_path;
  auto* b1 = pot->add_subcommand("bound1", "(1 + C) sqrt(||u||)")->fallthrough();
  b1->add_option("u", u_path)->required();
  b1->callback([&] { emit(g, bound_json(corollary1_bound(io::scalar_grid_from_json(io::read_json_file(u_path))))); });
  auto* b2 = pot->add_subcommand("bound2", "(1 + C) min_r r + sqrt(||u * chi_r||)")->fallthrough();
  b2->add_option("u", u_path)->required();
  b2->callback([&] {
    const PotentialBound b = corollary2_bound(io::scalar_grid_from_json(io::read_json_file(u_path)));
    emit(g, bound_json(b));
    if (!b.chain_holds) code = kFail;
  });

  // suite
  auto* suite = app.add_subcommand("suite", "run a verification battery")->fallthrough();
  std::string suite_name;
  std::string sizes = "4..8";
  std::size_t instances = 10;
  std::string plot_out;
  suite->add_option("name", suite_name, "duality | theorem2 | laczkovich | potentials | all")->required();
  suite->add_option("--sizes", sizes, "atom counts for the duality suite, e.g. 4..8");
  suite->add_option("--instances", instances);
  suite->add_option("--plot-out", plot_out, "plot-ready (x, y) series");
  suite->callback([&] {
    SuiteOptions o;
    o.seed = g.seed;
    o.tolerance = g.tol;
    o.instances = instances;
    std::tie(o.min_size, o.max_size) = parse_sizes(sizes);
    const SuiteName name = parse_suite_name(suite_name);
    const SuiteReport rep = run_suite(name, o);
    if (!g.csv_out.empty()) report_emit(rep, ReportFormat::kCsv, g.csv_out);
    if (!g.json_out.empty()) report_emit(rep, ReportFormat::kJson, g.json_out);
    if (!plot_out.empty()) report_emit(rep, ReportFormat::kPlotData, plot_out);
    std::cout << "suite " << rep.name << ": " << rep.table.rows.size() << " rows, " << rep.failures.size()
              << " failures\n";
    for (const auto& f : rep.failures) std::cout << "  FAIL " << f << '\n';
    if (!rep.passed()) code = kFail;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::logic_error& e) {
    std::cerr << "assertion failed: " << e.what() << '\n';
    return kFail;
  }
  return code;
}
