#ifndef EWG_RATIONAL_HPP
#define EWG_RATIONAL_HPP

#include <gmpxx.h>

#include <optional>
#include <string>

namespace ewg {

/// Exact rational scalar used by the algebraic paths.
using Rat = mpq_class;

/// Parses "p/q", a plain integer, or a decimal literal ("-1.25" -> -5/4).
/// Throws std::invalid_argument on malformed input.
Rat rat_from_string(const std::string& text);

/// Canonical rendering "p/q" (denominator always present, e.g. "-81/1").
std::string rat_to_string(const Rat& value);

inline double rat_to_double(const Rat& value) { return value.get_d(); }

/// Exact square root when `value` is a perfect square of a rational, else nullopt.
std::optional<Rat> rat_sqrt_exact(const Rat& value);

}  // namespace ewg

#endif
