#pragma once

#include "spreadlab/measure.hpp"

#include <initializer_list>
#include <vector>

namespace testutil {

using spreadlab::AtomicMeasure;
using spreadlab::Domain;
using spreadlab::Real;

// Unit-mass atoms on a 1D domain, positions given as p/q with a shared q.
inline AtomicMeasure line(std::initializer_list<std::int64_t> numerators, std::int64_t q, Real side = Real(16),
                          bool torus = false) {
  std::vector<Real> coords;
  std::vector<Real> masses;
  for (auto p : numerators) {
    coords.push_back(Real::exact(p, q));
    masses.emplace_back(1);
  }
  const Domain d = torus ? Domain::torus(1, side) : Domain::box(1, side);
  return AtomicMeasure(d, std::move(coords), std::move(masses));
}

inline AtomicMeasure point(const Domain& d, std::vector<Real> x, Real mass = Real(1)) {
  return AtomicMeasure(d, std::move(x), {std::move(mass)});
}

}  // namespace testutil
