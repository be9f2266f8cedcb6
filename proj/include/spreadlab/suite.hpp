#pragma once

#include "spreadlab/io.hpp"
#include "spreadlab/measure.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace spreadlab {

// --- Per-instance measurements ------------------------------------------------

struct Theorem2Options {
  /// Lebesgue measure is atomized on this many cells per axis for Tra(nu).
  int transport_cells = 32;
  /// Starting cell count per axis for the field grids; doubled until the
  /// pitch is at most Tra / 8 (dipole resolution).
  int field_cells = 64;
};

struct Theorem2Sample {
  int dimension = 1;
  double tra = 0.0;        ///< Tra(nu, m) against atomized Lebesgue measure
  double tra_slack = 0.0;  ///< h sqrt(d) / 2 of that atomization
  int field_cells = 0;
  double ra_lb_field = 0.0;  ///< Ra~ of the dipole field assembled from the optimal coupling
  double ra_ub_field = 0.0;  ///< Ra of the Poisson field
  double ratio_lo = 0.0;     ///< ra_lb_field / tra
  double ratio_hi = 0.0;     ///< tra / ra_ub_field
  double weak_residual = 0.0;  ///< of the Poisson field against the default battery
  double sup_u = 0.0;
  double bound1 = 0.0;
  double bound2 = 0.0;
  double corollary_ratio = 0.0;  ///< tra / sqrt(sup_u)
  bool chain_holds = true;
};

/// nu must be mass-balanced on a torus.
Theorem2Sample measure_theorem2(const AtomicMeasure& nu, const Theorem2Options& options = {});

/// Seeded perturbed lattice on the torus [0, side)^d with coordinates on a
/// 1/1024 grid, so that every distance computation is exact.
AtomicMeasure exact_perturbed_lattice(int dimension, std::int64_t side, double delta, std::uint64_t seed);

/// Seeded pair of unit-mass instances with n atoms each and coordinates on a
/// 1/8 grid (many ties).
std::pair<AtomicMeasure, AtomicMeasure> random_unit_pair(int dimension, int n, std::uint64_t seed);

// --- Suites --------------------------------------------------------------------

enum class SuiteName { kDuality, kTheorem2, kLaczkovich, kPotentials, kAll };

/// Throws std::invalid_argument for unknown names.
SuiteName parse_suite_name(const std::string& name);
std::string to_string(SuiteName name);

struct SuiteOptions {
  std::uint64_t seed = 1;
  int min_size = 4;
  int max_size = 8;
  /// Instances per dimension (per size for the duality suite).
  std::size_t instances = 10;
  double tolerance = 1e-9;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct SuiteReport {
  std::string name;
  Table table;
  std::vector<PlotSeries> series;
  std::vector<std::string> failures;
  /// Serialized failing instances, replayable through the CLI.
  std::vector<io::json> failing_instances;
  bool passed() const { return failures.empty(); }
};

SuiteReport run_suite(SuiteName name, const SuiteOptions& options);

enum class ReportFormat { kJson, kCsv, kPlotData };

ReportFormat parse_report_format(const std::string& name);
std::string to_csv(const Table& table);
std::string to_plotdata(const SuiteReport& report);
io::json to_json(const SuiteReport& report);
/// Throws std::runtime_error when the path cannot be written.
void report_emit(const SuiteReport& report, ReportFormat format, const std::filesystem::path& path);

/// Shortest round-trip text for a double.
std::string format_number(double x);

}  // namespace spreadlab
