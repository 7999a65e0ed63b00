#pragma once

// Exact rational arithmetic used throughout the flat-geometry core.
// cpp_rational keeps everything header-only; values stay tiny at desk scale.

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace vl {

using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rat& r) { return static_cast<double>(r); }

inline Rat rat_of(long long num, long long den = 1) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  return Rat(num, den);
}

// Parses "a/b" or "a" (optional sign). Used by the JSON interfaces.
inline Rat parse_rat(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(BigInt(s));
    BigInt num(s.substr(0, slash));
    BigInt den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    return Rat(num, den);
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed rational: '" + s + "'");
  }
}

// Canonical "a/b" (or "a" when integral) form for reports.
inline std::string format_rat(const Rat& r) {
  const BigInt num = numerator(r);
  const BigInt den = denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

// floor(r) as a plain integer; desk-scale values only.
inline long long rat_floor(const Rat& r) {
  BigInt q = numerator(r) / denominator(r);
  if (Rat(q) > r) q -= 1;
  return static_cast<long long>(q);
}

}  // namespace vl
