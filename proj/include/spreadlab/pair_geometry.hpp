#pragma once

#include "spreadlab/measure.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace spreadlab {

/// Pairwise source-target distances reduced to ranks into the sorted list of
/// distinct candidate radii.
///
/// When both measures (and the side) are exact, distances are compared as
/// integer squared numerators over a common denominator, so ties are exact.
/// Otherwise binary64 squared distances are used.
class PairGeometry {
 public:
  struct Pair {
    std::uint32_t source;
    std::uint32_t target;
  };

  PairGeometry(const AtomicMeasure& source, const AtomicMeasure& target);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_exact() const { return exact_; }

  /// Distinct radii in increasing order.
  const std::vector<Radius>& candidates() const { return candidates_; }
  std::uint32_t rank(std::size_t i, std::size_t j) const { return ranks_[i * cols_ + j]; }
  const Radius& pair_radius(std::size_t i, std::size_t j) const { return candidates_[rank(i, j)]; }

  /// Pairs whose distance is at most candidates()[k], sorted by rank.
  std::span<const Pair> pairs_within(std::size_t k) const;
  /// Index of the largest candidate <= r, or -1 if every pair is farther.
  std::ptrdiff_t threshold_index(const Radius& r) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  bool exact_ = false;
  std::vector<Radius> candidates_;
  std::vector<std::uint32_t> ranks_;
  std::vector<Pair> sorted_pairs_;
  std::vector<std::size_t> prefix_end_;
};

/// -1, 0, +1 as the distance between the two points compares to r.
/// Exact when the points, the side and r are exact.
int compare_distance(const AtomicMeasure& a, std::size_t i, const AtomicMeasure& b, std::size_t j,
                     const Radius& r);

}  // namespace spreadlab
