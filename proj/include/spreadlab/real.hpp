#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace spreadlab {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// A scalar that is either an exact rational or a binary64 approximation.
///
/// Arithmetic stays exact as long as both operands are exact; mixing in a
/// float operand degrades the result to float. Comparisons between two
/// exact values are exact.
class Real {
 public:
  Real() : value_(Rational(0)) {}
  Real(int v) : value_(Rational(v)) {}  // NOLINT(google-explicit-constructor)
  Real(std::int64_t v) : value_(Rational(v)) {}  // NOLINT
  Real(Rational v) : value_(std::move(v)) {}  // NOLINT
  explicit Real(double v) : value_(v) {}

  static Real exact(std::int64_t num, std::int64_t den);

  /// Interprets a JSON-style number: exact when it is a dyadic rational whose
  /// denominator is at most 2^20, float otherwise.
  static Real from_number(double v);

  /// Parses "p/q", integers and decimal literals ("0.4") exactly; anything
  /// else (exponents, nan) as float. Throws std::invalid_argument on junk.
  static Real parse(std::string_view text);

  bool is_exact() const { return std::holds_alternative<Rational>(value_); }
  const Rational& rational() const;
  double to_double() const;

  /// "p/q" for exact values, shortest round-trip decimal for floats.
  std::string to_string() const;

  friend Real operator+(const Real& a, const Real& b);
  friend Real operator-(const Real& a, const Real& b);
  friend Real operator*(const Real& a, const Real& b);
  friend Real operator/(const Real& a, const Real& b);
  Real operator-() const;
  Real& operator+=(const Real& o) { return *this = *this + o; }
  Real& operator-=(const Real& o) { return *this = *this - o; }

  friend bool operator==(const Real& a, const Real& b);
  friend bool operator<(const Real& a, const Real& b);
  friend bool operator<=(const Real& a, const Real& b) { return !(b < a); }
  friend bool operator>(const Real& a, const Real& b) { return b < a; }
  friend bool operator>=(const Real& a, const Real& b) { return !(a < b); }

 private:
  std::variant<Rational, double> value_;
};

Real abs(const Real& x);

/// Largest integer <= x, exact for exact x.
std::int64_t floor_to_int(const Real& x);

/// A closed radius, remembered exactly (as its square) when known.
struct Radius {
  double value = 0.0;
  std::optional<Rational> squared;

  static Radius from_real(const Real& r);
  static Radius from_squared(const Rational& sq);
  bool is_exact() const { return squared.has_value(); }
};

bool same_radius(const Radius& a, const Radius& b);

}  // namespace spreadlab
