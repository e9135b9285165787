#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace papp {

// Exact rational arithmetic for all scoring and quotient comparisons.
// Floating point is never used in rule evaluation.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

} // namespace papp
