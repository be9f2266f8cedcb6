#include "spreadlab/pair_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace spreadlab {

namespace {

using Int128 = __int128;

// Coordinates beyond this magnitude (after scaling by the common denominator)
// could overflow the 128-bit squared-distance accumulator.
constexpr std::int64_t kMaxScaledCoordinate = std::int64_t{1} << 40;

Integer to_integer(Int128 v) {
  const bool negative = v < 0;
  unsigned __int128 u = negative ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
  Integer out = static_cast<std::uint64_t>(u >> 64);
  out <<= 64;
  out += static_cast<std::uint64_t>(u & ~std::uint64_t{0});
  return negative ? Integer(-out) : out;
}

struct ScaledCoordinates {
  std::int64_t denominator = 1;
  std::int64_t side = 0;
  std::vector<std::int64_t> source;
  std::vector<std::int64_t> target;
};

std::optional<ScaledCoordinates> scale_to_integers(const AtomicMeasure& a, const AtomicMeasure& b) {
  if (!a.has_exact_positions() || !b.has_exact_positions()) return std::nullopt;
  Integer q = denominator(a.domain().side.rational());
  auto absorb = [&q](std::span<const Real> xs) {
    for (const Real& x : xs) {
      const Integer& den = denominator(x.rational());
      if (den != 1) q = boost::multiprecision::lcm(q, den);
      if (q > kMaxScaledCoordinate) return false;
    }
    return true;
  };
  if (!absorb(a.coordinates()) || !absorb(b.coordinates())) return std::nullopt;
  auto scale = [&q](const Real& x, std::int64_t& out) {
    Rational s = x.rational() * q;
    Integer v = numerator(s);
    if (v > kMaxScaledCoordinate || v < -kMaxScaledCoordinate) return false;
    out = v.convert_to<std::int64_t>();
    return true;
  };
  ScaledCoordinates out;
  out.denominator = q.convert_to<std::int64_t>();
  if (!scale(a.domain().side, out.side)) return std::nullopt;
  out.source.resize(a.coordinates().size());
  out.target.resize(b.coordinates().size());
  for (std::size_t i = 0; i < out.source.size(); ++i) {
    if (!scale(a.coordinates()[i], out.source[i])) return std::nullopt;
  }
  for (std::size_t i = 0; i < out.target.size(); ++i) {
    if (!scale(b.coordinates()[i], out.target[i])) return std::nullopt;
  }
  return out;
}

}  // namespace

PairGeometry::PairGeometry(const AtomicMeasure& source, const AtomicMeasure& target)
    : rows_(source.size()), cols_(target.size()) {
  if (!(source.domain() == target.domain())) {
    throw std::invalid_argument("measures live on different domains");
  }
  if (rows_ == 0 || cols_ == 0) throw std::invalid_argument("empty measure");
  if (rows_ * cols_ > std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("instance too large for the pair table");
  }
  const Domain& domain = source.domain();
  const int d = domain.dimension;
  const std::size_t n = rows_ * cols_;

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);

  auto build = [&](auto& keys, auto&& make_radius) {
    std::stable_sort(order.begin(), order.end(),
                     [&keys](std::uint32_t x, std::uint32_t y) { return keys[x] < keys[y]; });
    ranks_.assign(n, 0);
    sorted_pairs_.resize(n);
    for (std::size_t pos = 0; pos < n; ++pos) {
      const std::uint32_t idx = order[pos];
      if (pos == 0 || keys[idx] != keys[order[pos - 1]]) {
        if (pos > 0) prefix_end_.push_back(pos);
        candidates_.push_back(make_radius(keys[idx]));
      }
      ranks_[idx] = static_cast<std::uint32_t>(candidates_.size() - 1);
      sorted_pairs_[pos] = Pair{static_cast<std::uint32_t>(idx / cols_), static_cast<std::uint32_t>(idx % cols_)};
    }
    prefix_end_.push_back(n);
  };

  if (auto scaled = scale_to_integers(source, target)) {
    exact_ = true;
    std::vector<Int128> keys(n);
    const std::int64_t side = scaled->side;
    const bool torus = domain.is_torus();
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) {
        Int128 sum = 0;
        for (int k = 0; k < d; ++k) {
          std::int64_t delta = scaled->source[i * d + k] - scaled->target[j * d + k];
          if (delta < 0) delta = -delta;
          if (torus) delta = std::min(delta, side - delta);
          sum += static_cast<Int128>(delta) * delta;
        }
        keys[i * cols_ + j] = sum;
      }
    }
    Integer q2 = Integer(scaled->denominator) * scaled->denominator;
    const double q = static_cast<double>(scaled->denominator);
    build(keys, [&](Int128 key) {
      Radius r;
      r.squared = Rational(to_integer(key), q2);
      r.value = std::sqrt(static_cast<double>(key)) / q;
      return r;
    });
  } else {
    exact_ = false;
    std::vector<double> keys(n);
    const double side = domain.side.to_double();
    const bool torus = domain.is_torus();
    for (std::size_t i = 0; i < rows_; ++i) {
      auto a = source.position_approx(i);
      for (std::size_t j = 0; j < cols_; ++j) {
        auto b = target.position_approx(j);
        double sum = 0.0;
        for (int k = 0; k < d; ++k) {
          double delta = std::abs(a[k] - b[k]);
          if (torus) delta = std::min(delta, side - delta);
          sum += delta * delta;
        }
        keys[i * cols_ + j] = sum;
      }
    }
    build(keys, [](double key) {
      Radius r;
      r.value = std::sqrt(key);
      return r;
    });
  }
}

std::span<const PairGeometry::Pair> PairGeometry::pairs_within(std::size_t k) const {
  if (k >= candidates_.size()) return sorted_pairs_;
  return std::span<const Pair>(sorted_pairs_).first(prefix_end_[k]);
}

std::ptrdiff_t PairGeometry::threshold_index(const Radius& r) const {
  auto le = [&r](const Radius& c) {
    if (c.squared && r.squared) return *c.squared <= *r.squared;
    return c.value <= r.value;
  };
  std::ptrdiff_t lo = 0;
  std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(candidates_.size());
  while (lo < hi) {
    const std::ptrdiff_t mid = (lo + hi) / 2;
    if (le(candidates_[static_cast<std::size_t>(mid)])) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return lo - 1;
}

int compare_distance(const AtomicMeasure& a, std::size_t i, const AtomicMeasure& b, std::size_t j,
                     const Radius& r) {
  if (r.squared && a.has_exact_positions() && b.has_exact_positions()) {
    const Rational sq = squared_distance(a.domain(), a.position(i), b.position(j));
    return sq < *r.squared ? -1 : (sq == *r.squared ? 0 : 1);
  }
  const double dist = distance(a.domain(), a.position_approx(i), b.position_approx(j));
  return dist < r.value ? -1 : (dist == r.value ? 0 : 1);
}

}  // namespace spreadlab
