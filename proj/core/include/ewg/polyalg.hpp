#ifndef EWG_POLYALG_HPP
#define EWG_POLYALG_HPP

#include <optional>
#include <string>
#include <vector>

#include "ewg/multipoly.hpp"

namespace ewg {

/// Exact quotient f/g; throws NumericalError when g does not divide f.
MultiPoly divide_exact(const MultiPoly& f, const MultiPoly& g);
std::optional<MultiPoly> try_divide_exact(const MultiPoly& f, const MultiPoly& g);

/// Pseudo remainder of f by g with respect to var:
///   lc_var(g)^(deg f - deg g + 1) * f = q*g + prem.
MultiPoly pseudo_remainder(const MultiPoly& f, const MultiPoly& g, const std::string& var);

/// Greatest common divisor over Q[x1..xn], computed by subresultant
/// polynomial remainder sequences with recursive content stripping.
/// The result has coprime integer coefficients and positive leading
/// coefficient (canonical term order); gcd(0,0) = 0.
MultiPoly poly_gcd(const MultiPoly& f, const MultiPoly& g);
MultiPoly poly_gcd(const std::vector<MultiPoly>& polys);

/// Content of f with respect to var: gcd of the coefficient polynomials.
MultiPoly content_in(const MultiPoly& f, const std::string& var);
MultiPoly primitive_part_in(const MultiPoly& f, const std::string& var);

/// Scales f by a rational so coefficients are coprime integers and the
/// leading coefficient (canonical term order) is positive. Zero stays zero.
MultiPoly normalize_primitive(const MultiPoly& f);

/// Determinant of the Sylvester matrix of f and g in var (actual degrees).
/// Preconditions: f, g nonzero with positive degree in var.
MultiPoly resultant(const MultiPoly& f, const MultiPoly& g, const std::string& var);

/// Resultant at declared formal degrees (>= actual). Needed for homogeneous
/// systems whose leading coefficients may vanish on special inputs.
MultiPoly resultant_formal(const MultiPoly& f, const MultiPoly& g, const std::string& var,
                           int deg_f, int deg_g);

/// disc(f) = (-1)^(d(d-1)/2) res(f, f', var) / lc_var(f), d = deg_var(f) >= 2.
/// For a quadratic a*v^2 + b*v + c this is exactly b^2 - 4ac.
MultiPoly discriminant(const MultiPoly& f, const std::string& var);

/// b^2 - 4ac for f read as a formal quadratic in var (a may be zero).
MultiPoly discriminant_formal_quadratic(const MultiPoly& f, const std::string& var);

/// Product of the distinct irreducible factors:
/// f / gcd(f, df/dx1, ..., df/dxn), normalized via normalize_primitive.
MultiPoly squarefree_part(const MultiPoly& f);

/// True iff gcd(f, all partials) is constant.
bool is_squarefree(const MultiPoly& f);

/// All real roots of a univariate polynomial (exact coefficients, double
/// output). Multiple roots are reported once. Throws InputError if f involves
/// more than the named variable.
std::vector<double> real_roots(const MultiPoly& f, const std::string& var);

/// Real roots of a double-coefficient univariate polynomial (ascending
/// coefficients). Intended for simple-root inputs; near-multiple roots are
/// found via critical-point inspection.
std::vector<double> real_roots_double(std::vector<double> ascending_coeffs);

}  // namespace ewg

#endif
