#include "spreadlab/real.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace spreadlab {

namespace {

constexpr int kMaxDyadicExponent = 20;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_integer_literal(std::string_view s) {
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) s.remove_prefix(1);
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

Integer parse_integer(std::string_view s) {
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  Integer v{std::string(s)};
  return negative ? Integer(-v) : v;
}

}  // namespace

Real Real::exact(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  return Real(Rational(num, den));
}

Real Real::from_number(double v) {
  if (!std::isfinite(v)) return Real(v);
  const double scaled = std::ldexp(v, kMaxDyadicExponent);
  if (std::abs(scaled) < 0x1p62 && std::trunc(scaled) == scaled) {
    const auto num = static_cast<std::int64_t>(scaled);
    return Real(Rational(num, std::int64_t{1} << kMaxDyadicExponent));
  }
  return Real(v);
}

Real Real::parse(std::string_view text) {
  std::string_view s = trim(text);
  if (s.empty()) throw std::invalid_argument("empty number");
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = trim(s.substr(0, slash));
    auto den = trim(s.substr(slash + 1));
    if (!is_integer_literal(num) || !is_integer_literal(den)) {
      throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
    }
    Integer d = parse_integer(den);
    if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    return Real(Rational(parse_integer(num), d));
  }
  if (is_integer_literal(s)) return Real(Rational(parse_integer(s)));
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string digits(s.substr(0, dot));
    std::string frac(s.substr(dot + 1));
    if (digits.empty() || digits == "-" || digits == "+") digits += "0";
    if (is_integer_literal(digits) && (frac.empty() || is_integer_literal(frac)) &&
        (frac.empty() || (frac.front() != '+' && frac.front() != '-'))) {
      const bool negative = digits.front() == '-';
      Integer whole = parse_integer(digits);
      if (negative) whole = -whole;
      Integer f = frac.empty() ? Integer(0) : Integer(frac);
      Integer scale = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(frac.size()));
      Rational value(whole * scale + f, scale);
      return Real(negative ? Rational(-value) : value);
    }
  }
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return Real(v);
}

const Rational& Real::rational() const {
  if (const auto* r = std::get_if<Rational>(&value_)) return *r;
  throw std::logic_error("Real::rational() called on a float value");
}

double Real::to_double() const {
  if (const auto* r = std::get_if<Rational>(&value_)) return r->convert_to<double>();
  return std::get<double>(value_);
}

std::string Real::to_string() const {
  if (const auto* r = std::get_if<Rational>(&value_)) {
    if (denominator(*r) == 1) return numerator(*r).str();
    return numerator(*r).str() + "/" + denominator(*r).str();
  }
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), std::get<double>(value_));
  return std::string(buf, ptr);
}

Real operator+(const Real& a, const Real& b) {
  if (a.is_exact() && b.is_exact()) return Real(Rational(a.rational() + b.rational()));
  return Real(a.to_double() + b.to_double());
}

Real operator-(const Real& a, const Real& b) {
  if (a.is_exact() && b.is_exact()) return Real(Rational(a.rational() - b.rational()));
  return Real(a.to_double() - b.to_double());
}

Real operator*(const Real& a, const Real& b) {
  if (a.is_exact() && b.is_exact()) return Real(Rational(a.rational() * b.rational()));
  return Real(a.to_double() * b.to_double());
}

Real operator/(const Real& a, const Real& b) {
  if (a.is_exact() && b.is_exact()) {
    if (b.rational() == 0) throw std::domain_error("division by zero");
    return Real(Rational(a.rational() / b.rational()));
  }
  return Real(a.to_double() / b.to_double());
}

Real Real::operator-() const {
  if (is_exact()) return Real(Rational(-rational()));
  return Real(-to_double());
}

bool operator==(const Real& a, const Real& b) {
  if (a.is_exact() && b.is_exact()) return a.rational() == b.rational();
  return a.to_double() == b.to_double();
}

bool operator<(const Real& a, const Real& b) {
  if (a.is_exact() && b.is_exact()) return a.rational() < b.rational();
  return a.to_double() < b.to_double();
}

Real abs(const Real& x) { return x < Real(0) ? -x : x; }

std::int64_t floor_to_int(const Real& x) {
  if (x.is_exact()) {
    const Rational& r = x.rational();
    Integer q = numerator(r) / denominator(r);  // truncates toward zero
    if (r < 0 && q * denominator(r) != numerator(r)) q -= 1;
    return q.convert_to<std::int64_t>();
  }
  return static_cast<std::int64_t>(std::floor(x.to_double()));
}

Radius Radius::from_real(const Real& r) {
  if (r < Real(0)) throw std::invalid_argument("negative radius");
  Radius out;
  out.value = r.to_double();
  if (r.is_exact()) out.squared = Rational(r.rational() * r.rational());
  return out;
}

Radius Radius::from_squared(const Rational& sq) {
  Radius out;
  out.value = std::sqrt(sq.convert_to<double>());
  out.squared = sq;
  return out;
}

bool same_radius(const Radius& a, const Radius& b) {
  if (a.squared && b.squared) return *a.squared == *b.squared;
  return a.value == b.value;
}

}  // namespace spreadlab
