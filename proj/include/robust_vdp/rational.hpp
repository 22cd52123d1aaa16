#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace robust_vdp {

/// Exact arbitrary-precision rational; every probability and loss component.
using Scalar = mpq_class;

/// Parses "p/q", "p" or a finite decimal such as "-0.75" exactly.
/// Throws Error(InvalidArgument) on anything else, including q = 0.
Scalar parse_scalar(std::string_view text);

/// Canonical form: "p" for integers, "p/q" otherwise (q > 0, reduced).
std::string to_string(const Scalar& x);

/// Decimal rendering rounded half away from zero to `digits` places,
/// trailing zeros trimmed ("4.5", "0.333333").
std::string to_decimal(const Scalar& x, int digits = 6);

inline Scalar rational(long num, long den = 1) {
    Scalar q(num, den);
    q.canonicalize();
    return q;
}

}  // namespace robust_vdp
