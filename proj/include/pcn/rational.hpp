#pragma once

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace pcn {

/// Exact rational used for every closed form.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rational ratio(long long num, long long den) { return Rational(num, den); }

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline std::string to_string(const Rational& r) { return r.str(); }

}  // namespace pcn
