#pragma once

#include "spreadlab/measure.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace spreadlab {

/// Regular cell lattice on a torus domain. Cell k along an axis has centre
/// (k + 1/2) * pitch. Storage is row-major with unused axes of extent 1.
struct Lattice {
  Domain domain;
  std::array<int, 3> shape{1, 1, 1};

  static Lattice cubic(const Domain& domain, int cells_per_axis);
  /// side / pitch must be (close to) an integer.
  static Lattice with_pitch(const Domain& domain, double pitch);

  void validate() const;
  int dimension() const { return domain.dimension; }
  std::size_t size() const;
  double side() const { return domain.side.to_double(); }
  double pitch(int axis) const { return side() / shape[static_cast<std::size_t>(axis)]; }
  double max_pitch() const;
  double cell_volume() const;

  std::array<int, 3> unravel(std::size_t index) const;
  /// Periodic: indices are wrapped into range.
  std::size_t ravel(std::array<int, 3> idx) const;
  std::array<double, 3> center(std::size_t index) const;
  /// Cell whose centre is nearest to x (periodic).
  std::size_t nearest_cell(std::span<const double> x) const;
};

bool operator==(const Lattice& a, const Lattice& b);

/// Point samples of a scalar function at cell centres.
struct ScalarGrid {
  Lattice lattice;
  std::vector<double> values;

  explicit ScalarGrid(Lattice l) : lattice(std::move(l)), values(lattice.size(), 0.0) {}
  double sup_norm() const;
};

/// A (possibly signed) measure given by its mass on each cell.
struct GridMeasure {
  Lattice lattice;
  std::vector<double> cell_mass;

  explicit GridMeasure(Lattice l) : lattice(std::move(l)), cell_mass(lattice.size(), 0.0) {}
  /// Lebesgue measure: cell mass h^d everywhere.
  static GridMeasure lebesgue(const Lattice& lattice);
  double density(std::size_t i) const { return cell_mass[i] / lattice.cell_volume(); }
  double total() const;
};

/// A vector field sampled at cell centres; components are stored one after
/// another (component-major).
struct GridField {
  Lattice lattice;
  std::vector<std::vector<double>> components;

  explicit GridField(Lattice l);
  std::array<double, 3> at(std::size_t i) const;
  double norm_at(std::size_t i) const;
  double sup_norm() const;
  /// Integral of |v| over the domain.
  double l1_norm() const;
};

GridField operator+(const GridField& a, const GridField& b);
GridField operator*(double s, const GridField& a);

/// Finite trigonometric polynomial sum_k a_k cos(2 pi <k, x> / L + phase_k).
struct TestFunction {
  struct Mode {
    std::array<int, 3> frequency{0, 0, 0};
    double amplitude = 0.0;
    double phase = 0.0;
  };
  int dimension = 1;
  double period = 1.0;
  std::vector<Mode> modes;

  double value(std::span<const double> x) const;
  std::array<double, 3> gradient(std::span<const double> x) const;
  /// sum |a_k| * 2 pi |k| / L, an upper bound for the sup of |grad phi|.
  double gradient_bound() const;
};

/// `count` seeded random test functions with three modes each and
/// frequencies |k|_inf <= max_frequency.
std::vector<TestFunction> default_battery(int dimension, double period, std::uint64_t seed = 20,
                                          int count = 20, int max_frequency = 4);

/// Deposits each atom's mass on the cell whose centre is nearest.
GridMeasure deposit(const AtomicMeasure& nu, const Lattice& lattice);

/// Cell centres and cell masses as an atomic measure (float masses).
AtomicMeasure atomize(const GridMeasure& mu);

}  // namespace spreadlab
