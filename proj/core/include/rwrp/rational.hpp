#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace rwrp {

using Rational = boost::multiprecision::cpp_rational;
using RationalVector = std::vector<Rational>;

/// Parses "p/q" or "p" (optional sign). Throws ValidationError on malformed text.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& r);
double to_double(const Rational& r);

/// Least common multiple of the coordinate denominators.
boost::multiprecision::cpp_int common_denominator(const RationalVector& v);

/// Finds some x >= 0 with A x = b exactly, or nullopt when the system is
/// infeasible. Phase-I simplex with Bland's rule; a basic solution is returned.
/// `A` is row-major with rows of equal length.
std::optional<RationalVector> find_nonnegative_solution(const std::vector<RationalVector>& A,
                                                        const RationalVector& b);

}  // namespace rwrp
