#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace toposym {

// Probabilities are exact: no floating point anywhere in the analysis path.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt pow2(unsigned e) { return BigInt(1) << e; }

// count / 2^e
inline Rational dyadic(const BigInt& count, unsigned e) {
  return Rational(count, pow2(e));
}

inline std::string to_string(const Rational& r) {
  return r.str();
}

inline double to_double(const Rational& r) {
  return r.convert_to<double>();
}

}  // namespace toposym
