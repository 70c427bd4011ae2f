#ifndef OMINAL_RATIONAL_HPP
#define OMINAL_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <string>

#include "ominal/core.hpp"

namespace ominal {

/// Exact rational scalar.  Always reduced, denominator positive.
using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

inline std::string rat_to_string(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

/// Parses "p", "-p", "p/q".  Returns nullopt on malformed input.
inline std::optional<Rational> parse_rational(const std::string& s) {
  if (s.empty()) return std::nullopt;
  auto digits = [](const std::string& t) {
    if (t.empty()) return false;
    std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
    if (i == t.size()) return false;
    for (; i < t.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
    return true;
  };
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) {
      if (!digits(s)) return std::nullopt;
      return Rational(Integer(s));
    }
    std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!digits(num) || !digits(den)) return std::nullopt;
    Integer d(den);
    if (d == 0) return std::nullopt;
    return Rational(Integer(num), d);
  } catch (...) {
    return std::nullopt;
  }
}

/// A rational extended with the two infinities; used for band bounds and
/// for suprema of definable subsets of the line.
struct ExtRational {
  enum Kind { NegInf, Finite, PosInf };
  Kind kind = Finite;
  Rational value;  // meaningful only when kind == Finite

  static ExtRational neg_inf() { return {NegInf, Rational(0)}; }
  static ExtRational pos_inf() { return {PosInf, Rational(0)}; }
  static ExtRational finite(Rational v) { return {Finite, std::move(v)}; }

  bool is_finite() const { return kind == Finite; }

  friend bool operator==(const ExtRational& a, const ExtRational& b) {
    return a.kind == b.kind && (a.kind != Finite || a.value == b.value);
  }
  friend bool operator<(const ExtRational& a, const ExtRational& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.kind == Finite && a.value < b.value;
  }

  std::string str() const {
    switch (kind) {
      case NegInf: return "-inf";
      case PosInf: return "+inf";
      default: return rat_to_string(value);
    }
  }
};

}  // namespace ominal

#endif  // OMINAL_RATIONAL_HPP
