#include "spreadlab/suite.hpp"

#include "spreadlab/discrepancy.hpp"
#include "spreadlab/field.hpp"
#include "spreadlab/laczkovich.hpp"
#include "spreadlab/potential.hpp"
#include "spreadlab/transport.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace spreadlab {

std::string format_number(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

AtomicMeasure exact_perturbed_lattice(int dimension, std::int64_t side, double delta, std::uint64_t seed) {
  InstanceParams p;
  p.kind = InstanceKind::kPerturbedLattice;
  p.dimension = dimension;
  p.side = Real(side);
  p.domain = DomainKind::kTorus;
  p.delta = delta;
  p.denominator = 1024;
  return generate_instance(p, seed);
}

std::pair<AtomicMeasure, AtomicMeasure> random_unit_pair(int dimension, int n, std::uint64_t seed) {
  InstanceParams p;
  p.kind = InstanceKind::kPoissonProcess;
  p.dimension = dimension;
  p.side = Real(2);
  p.domain = seed % 2 == 0 ? DomainKind::kTorus : DomainKind::kBox;
  p.count = n;
  p.denominator = 8;
  return {generate_instance(p, instance_seed(seed, 0)), generate_instance(p, instance_seed(seed, 1))};
}

Theorem2Sample measure_theorem2(const AtomicMeasure& nu, const Theorem2Options& options) {
  const Domain& domain = nu.domain();
  if (!domain.is_torus()) throw std::invalid_argument("the field-versus-transport measurements need a torus domain");
  const int d = domain.dimension;
  Theorem2Sample s;
  s.dimension = d;

  const Real tra_pitch = domain.side / Real(options.transport_cells);
  const AtomicMeasure lebesgue = lebesgue_atoms(domain, tra_pitch, &nu.total_mass());
  const BottleneckResult tra = bottleneck_distance(nu, lebesgue);
  s.tra = tra.value.value;
  s.tra_slack = tra_pitch.to_double() * std::sqrt(static_cast<double>(d)) / 2.0;

  int cells = options.field_cells;
  while (domain.side.to_double() / cells > s.tra / 8.0) cells *= 2;
  s.field_cells = cells;
  const Lattice lattice = Lattice::cubic(domain, cells);

  const GridField transport_field = assemble_transport_field(tra.witness, s.tra, lattice);
  s.ra_lb_field = ra_tilde(transport_field).value;

  const GridMeasure deposited = deposit(nu, lattice);
  const PoissonSolution poisson = poisson_connect(deposited);
  s.ra_ub_field = ra(poisson.field).value;
  const auto battery = default_battery(d, domain.side.to_double());
  s.weak_residual = weak_divergence_report(poisson.field, minus_lebesgue(deposited), battery).max_residual;

  s.ratio_lo = s.tra > 0.0 ? s.ra_lb_field / s.tra : 0.0;
  s.ratio_hi = s.ra_ub_field > 0.0 ? s.tra / s.ra_ub_field : 0.0;

  const PotentialBound b1 = corollary1_bound(poisson.potential);
  const PotentialBound b2 = corollary2_bound(poisson.potential);
  s.sup_u = b1.sup_u;
  s.bound1 = b1.bound;
  s.bound2 = b2.bound;
  s.chain_holds = b2.chain_holds;
  s.corollary_ratio = s.sup_u > 0.0 ? s.tra / std::sqrt(s.sup_u) : 0.0;
  return s;
}

SuiteName parse_suite_name(const std::string& name) {
  if (name == "duality") return SuiteName::kDuality;
  if (name == "theorem2") return SuiteName::kTheorem2;
  if (name == "laczkovich") return SuiteName::kLaczkovich;
  if (name == "potentials") return SuiteName::kPotentials;
  if (name == "all") return SuiteName::kAll;
  throw std::invalid_argument("unknown suite '" + name + "' (duality, theorem2, laczkovich, potentials, all)");
}

std::string to_string(SuiteName name) {
  switch (name) {
    case SuiteName::kDuality: return "duality";
    case SuiteName::kTheorem2: return "theorem2";
    case SuiteName::kLaczkovich: return "laczkovich";
    case SuiteName::kPotentials: return "potentials";
    case SuiteName::kAll: return "all";
  }
  return "unknown";
}

namespace {

std::string radius_text(const Radius& r) {
  return r.squared ? "sqrt(" + Real(*r.squared).to_string() + ")" : format_number(r.value);
}

SuiteReport duality_suite(const SuiteOptions& o) {
  SuiteReport rep;
  rep.name = "duality";
  rep.table.columns = {"n", "tra", "di", "gap"};
  // One row per instance; instances are independent and run in parallel,
  // the table is assembled afterwards in a fixed order.
  struct Job {
    int d, n;
    std::size_t k;
  };
  std::vector<Job> jobs;
  for (int n = o.min_size; n <= o.max_size; ++n) {
    for (int d = 1; d <= 3; ++d) {
      for (std::size_t k = 0; k < o.instances; ++k) jobs.push_back({d, n, k});
    }
  }
  struct Outcome {
    std::vector<std::string> row;
    std::string failure;
    io::json instance;
  };
  std::vector<Outcome> out(jobs.size());
  const auto count = static_cast<std::int64_t>(jobs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t idx = 0; idx < count; ++idx) {
    const Job& job = jobs[static_cast<std::size_t>(idx)];
    Outcome& res = out[static_cast<std::size_t>(idx)];
    const std::uint64_t seed = instance_seed(o.seed, static_cast<std::size_t>((job.d * 100 + job.n) * 100000) + job.k);
    const auto [a, b] = random_unit_pair(job.d, job.n, seed);
    try {
      const auto report = duality_check(a, b);
      const Radius brute = brute_force_bottleneck(a, b);
      const auto cut = discrepancy_distance(a, b, DiscrepancyMethod::kCutCertificate);
      res.row = {std::to_string(job.n), radius_text(report.tra), radius_text(report.di), format_number(report.gap)};
      if (!report.agree || !same_radius(report.tra, brute) || !same_radius(report.di, cut.value)) {
        res.failure = "duality mismatch at d=" + std::to_string(job.d) + " n=" + std::to_string(job.n) +
                      " seed=" + std::to_string(seed);
      }
    } catch (const std::exception& e) {
      res.failure = std::string("duality error: ") + e.what();
    }
    if (!res.failure.empty()) res.instance = {{"nu1", io::to_json(a)}, {"nu2", io::to_json(b)}};
  }
  for (auto& r : out) {
    if (!r.row.empty()) rep.table.rows.push_back(std::move(r.row));
    if (!r.failure.empty()) {
      rep.failures.push_back(std::move(r.failure));
      rep.failing_instances.push_back(std::move(r.instance));
    }
  }
  return rep;
}

const std::vector<double> kScales{1.0, 2.0, 4.0};

struct ScaledSamples {
  int dimension;
  std::size_t index;
  double delta;
  std::vector<Theorem2Sample> by_scale;
  AtomicMeasure base;
};

std::vector<ScaledSamples> scaled_batch(const SuiteOptions& o, const std::vector<int>& dims) {
  std::vector<ScaledSamples> jobs;
  const std::vector<double> deltas{0.1, 0.2, 0.3, 0.4};
  for (int d : dims) {
    for (std::size_t k = 0; k < o.instances; ++k) {
      const double delta = deltas[k % deltas.size()];
      const std::int64_t side = d == 1 ? 16 : 8;
      jobs.push_back({d, k, delta, {}, exact_perturbed_lattice(d, side, delta, instance_seed(o.seed, 7000 + d * 1000 + k))});
    }
  }
  const auto count = static_cast<std::int64_t>(jobs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i) {
    auto& job = jobs[static_cast<std::size_t>(i)];
    Theorem2Options opt;
    opt.transport_cells = job.dimension == 1 ? 64 : 32;
    opt.field_cells = job.dimension == 1 ? 256 : 64;
    for (double t : kScales) {
      const AtomicMeasure scaled = scale_measure(job.base, Real::from_number(t), MassScaling::kLebesgue);
      job.by_scale.push_back(measure_theorem2(scaled, opt));
    }
  }
  return jobs;
}

bool stable(const std::vector<double>& values, double band) {
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*lo <= 0.0) return *hi <= 0.0;
  return *hi <= (1.0 + band) * *lo && *lo >= (1.0 - band) * *hi;
}

std::string label(const ScaledSamples& s, double t) {
  return "d" + std::to_string(s.dimension) + "-i" + std::to_string(s.index) + "-t" + format_number(t);
}

SuiteReport theorem2_suite(const SuiteOptions& o) {
  SuiteReport rep;
  rep.name = "theorem2";
  rep.table.columns = {"instance", "tra", "ra_lb_field", "ra_ub_field", "ratio_lo", "ratio_hi"};
  PlotSeries tra_vs_scale{"tra_vs_scale", {}, {}};
  PlotSeries lo_vs_scale{"ratio_lo_vs_scale", {}, {}};
  PlotSeries hi_vs_scale{"ratio_hi_vs_scale", {}, {}};
  for (const auto& job : scaled_batch(o, {1, 2})) {
    std::vector<double> lo;
    std::vector<double> hi;
    for (std::size_t i = 0; i < kScales.size(); ++i) {
      const auto& s = job.by_scale[i];
      rep.table.rows.push_back({label(job, kScales[i]), format_number(s.tra), format_number(s.ra_lb_field),
                                format_number(s.ra_ub_field), format_number(s.ratio_lo), format_number(s.ratio_hi)});
      tra_vs_scale.x.push_back(kScales[i]);
      tra_vs_scale.y.push_back(s.tra);
      lo_vs_scale.x.push_back(kScales[i]);
      lo_vs_scale.y.push_back(s.ratio_lo);
      hi_vs_scale.x.push_back(kScales[i]);
      hi_vs_scale.y.push_back(s.ratio_hi);
      lo.push_back(s.ratio_lo);
      hi.push_back(s.ratio_hi);
      if (s.ratio_lo > transport_lower_constant(job.dimension) || s.ratio_hi > transport_upper_constant(job.dimension)) {
        rep.failures.push_back("transport-to-field ratio above its constant at " + label(job, kScales[i]));
        rep.failing_instances.push_back(io::to_json(job.base));
      }
    }
    if (!stable(lo, 0.2) || !stable(hi, 0.2)) {
      rep.failures.push_back("transport-to-field ratio not scale-stable at " + label(job, 1.0));
      rep.failing_instances.push_back(io::to_json(job.base));
    }
  }
  rep.series = {tra_vs_scale, lo_vs_scale, hi_vs_scale};
  return rep;
}

SuiteReport potentials_suite(const SuiteOptions& o) {
  SuiteReport rep;
  rep.name = "potentials";
  rep.table.columns = {"instance", "tra", "sup_u", "bound1", "bound2", "ratio", "chain"};
  PlotSeries bound_vs_measured{"bound1_vs_tra", {}, {}};
  for (const auto& job : scaled_batch(o, {1, 2})) {
    std::vector<double> ratios;
    const double k_d = 1.0 + potential_constant(job.dimension);
    for (std::size_t i = 0; i < kScales.size(); ++i) {
      const auto& s = job.by_scale[i];
      rep.table.rows.push_back({label(job, kScales[i]), format_number(s.tra), format_number(s.sup_u),
                                format_number(s.bound1), format_number(s.bound2), format_number(s.corollary_ratio),
                                s.chain_holds ? "1" : "0"});
      bound_vs_measured.x.push_back(s.tra);
      bound_vs_measured.y.push_back(s.bound1);
      ratios.push_back(s.corollary_ratio);
      if (s.corollary_ratio > k_d || s.bound2 > s.bound1 || !s.chain_holds) {
        rep.failures.push_back("potential bound check failed at " + label(job, kScales[i]));
        rep.failing_instances.push_back(io::to_json(job.base));
      }
    }
    if (!stable(ratios, 0.2)) {
      rep.failures.push_back("corollary ratio not scale-stable at " + label(job, 1.0));
      rep.failing_instances.push_back(io::to_json(job.base));
    }
  }
  rep.series = {bound_vs_measured};
  return rep;
}

SuiteReport laczkovich_suite(const SuiteOptions& o) {
  SuiteReport rep;
  rep.name = "laczkovich";
  rep.table.columns = {"check", "dim", "param", "value", "bound", "pass"};
  const std::size_t count = std::max<std::size_t>(o.instances, 1) * 100;
  for (int d : {2, 3}) {
    for (std::int64_t m : {3, 5, 7}) {
      const ClaimBatch b = claim_batch(d, m, o.seed, count);
      rep.table.rows.push_back({"claim", std::to_string(d), "M=" + std::to_string(m), std::to_string(b.failures),
                                std::to_string(b.count), b.failures == 0 ? "1" : "0"});
      if (b.failures != 0) {
        rep.failures.push_back("claim failed for d=" + std::to_string(d) + " M=" + std::to_string(m) +
                               " instance " + std::to_string(b.first_failure));
        rep.failing_instances.push_back({{"dim", d}, {"M", m}, {"seed", o.seed}, {"index", b.first_failure}});
      }
    }
  }
  for (double delta : {0.1, 0.2, 0.4}) {
    const AtomicMeasure nu = exact_perturbed_lattice(2, 16, delta, instance_seed(o.seed, 900));
    const double rho = rho_analytic_perturbed_lattice(2, delta);
    const PipelineResult p = laczkovich_pipeline(nu, rho, 20, o.seed);
    std::vector<CubeUnion> family;
    for (std::size_t i = 0; i < 50; ++i) family.push_back(random_cube_union(2, 16, instance_seed(o.seed, 5000 + i)));
    const RhoEstimate est = rho_upper_bound(nu, family);
    const bool ok = p.chain_holds && est.raw <= rho;
    rep.table.rows.push_back({"pipeline", "2", "delta=" + format_number(delta), format_number(est.raw),
                              format_number(p.bound), ok ? "1" : "0"});
    if (!ok) {
      rep.failures.push_back("Laczkovich pipeline failed at delta=" + format_number(delta));
      rep.failing_instances.push_back(io::to_json(nu));
    }
  }
  return rep;
}

void append(SuiteReport& into, SuiteReport part) {
  into.failures.insert(into.failures.end(), part.failures.begin(), part.failures.end());
  into.failing_instances.insert(into.failing_instances.end(), part.failing_instances.begin(), part.failing_instances.end());
  for (auto& s : part.series) {
    s.name = part.name + "/" + s.name;
    into.series.push_back(std::move(s));
  }
  for (auto& row : part.table.rows) {
    std::vector<std::string> r{part.name};
    std::string joined;
    for (std::size_t i = 0; i < row.size(); ++i) joined += (i ? ";" : "") + part.table.columns[i] + "=" + row[i];
    r.push_back(std::move(joined));
    into.table.rows.push_back(std::move(r));
  }
}

}  // namespace

SuiteReport run_suite(SuiteName name, const SuiteOptions& options) {
  if (options.min_size < 1 || options.max_size < options.min_size || options.max_size > 9) {
    throw std::invalid_argument("sizes must satisfy 1 <= min <= max <= 9");
  }
  switch (name) {
    case SuiteName::kDuality: return duality_suite(options);
    case SuiteName::kTheorem2: return theorem2_suite(options);
    case SuiteName::kLaczkovich: return laczkovich_suite(options);
    case SuiteName::kPotentials: return potentials_suite(options);
    case SuiteName::kAll: break;
  }
  SuiteReport all;
  all.name = "all";
  all.table.columns = {"suite", "row"};
  append(all, duality_suite(options));
  append(all, theorem2_suite(options));
  append(all, laczkovich_suite(options));
  append(all, potentials_suite(options));
  return all;
}

ReportFormat parse_report_format(const std::string& name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "plotdata") return ReportFormat::kPlotData;
  throw std::invalid_argument("unknown report format '" + name + "' (json, csv, plotdata)");
}

namespace {

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_csv(const Table& table) {
  std::ostringstream out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << csv_cell(table.columns[i]);
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
    out << '\n';
  }
  return out.str();
}

std::string to_plotdata(const SuiteReport& report) {
  std::ostringstream out;
  for (const auto& s : report.series) {
    out << "# " << s.name << '\n';
    for (std::size_t i = 0; i < s.x.size(); ++i) out << format_number(s.x[i]) << ' ' << format_number(s.y[i]) << '\n';
    out << "\n\n";
  }
  return out.str();
}

io::json to_json(const SuiteReport& report) {
  io::json series = io::json::array();
  for (const auto& s : report.series) series.push_back({{"name", s.name}, {"x", s.x}, {"y", s.y}});
  return {{"suite", report.name},
          {"passed", report.passed()},
          {"columns", report.table.columns},
          {"rows", report.table.rows},
          {"series", std::move(series)},
          {"failures", report.failures},
          {"failing_instances", report.failing_instances}};
}

void report_emit(const SuiteReport& report, ReportFormat format, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  switch (format) {
    case ReportFormat::kJson: out << to_json(report).dump(1) << '\n'; break;
    case ReportFormat::kCsv: out << to_csv(report.table); break;
    case ReportFormat::kPlotData: out << to_plotdata(report); break;
  }
  if (!out) throw std::runtime_error("error while writing " + path.string());
}

}  // namespace spreadlab
