#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include <gmpxx.h>

namespace tilewalsh {

using Integer = mpz_class;
using Rational = mpq_class;

/// Exact 2^e for any integer e.
Rational pow2(int e);

/// Parses "7", "-3/4", "0.125", "1.5e-3" exactly. Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

/// Canonical text: "n" for integers, "n/d" otherwise (always reduced).
std::string format_rational(const Rational& r);

/// Shortest round-trippable decimal for a double ("%.17g").
std::string format_real(double x);

double to_double(const Rational& r);

/// True when q is a positive integer small enough for exact powers.
bool is_small_integer(double q);

/// A certificate-side quantity: exact rational or float.
using Quantity = std::variant<Rational, double>;

double quantity_to_double(const Quantity& q);
std::string format_quantity(const Quantity& q);

inline std::uint64_t pow2u(int e) { return std::uint64_t{1} << e; }

}  // namespace tilewalsh
