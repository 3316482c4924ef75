#ifndef EWG_MULTIPOLY_HPP
#define EWG_MULTIPOLY_HPP

#include <map>
#include <string>
#include <vector>

#include "ewg/rational.hpp"

namespace ewg {

/// Sparse multivariate polynomial with exact rational coefficients.
/// Variables are kept sorted by name; exponent vectors align with the
/// variable list and terms are ordered lexicographically by exponents.
/// No zero coefficients are stored and variables that no term uses are
/// dropped, so equal polynomials compare equal structurally.
class MultiPoly {
 public:
  MultiPoly() = default;  // zero polynomial

  static MultiPoly constant(const Rat& value);
  static MultiPoly constant(long value) { return constant(Rat(value)); }
  static MultiPoly variable(const std::string& name);

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// Value of a constant polynomial (zero polynomial gives 0).
  Rat constant_value() const;

  const std::vector<std::string>& variables() const { return vars_; }
  bool uses_variable(const std::string& name) const;

  /// Degree in one variable; -1 for the zero polynomial.
  int degree(const std::string& var) const;
  int total_degree() const;

  MultiPoly operator-() const;
  MultiPoly& operator+=(const MultiPoly& o);
  MultiPoly& operator-=(const MultiPoly& o);
  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
  MultiPoly& operator*=(const MultiPoly& o) { return *this = *this * o; }
  MultiPoly& operator*=(const Rat& s);
  friend MultiPoly operator*(MultiPoly a, const Rat& s) { return a *= s; }
  friend MultiPoly operator*(const Rat& s, MultiPoly a) { return a *= s; }
  MultiPoly pow(int k) const;

  MultiPoly derivative(const std::string& var) const;

  /// Coefficient polynomials with respect to one variable, keyed by power.
  std::map<int, MultiPoly> coefficients_in(const std::string& var) const;
  static MultiPoly from_coefficients_in(const std::string& var,
                                        const std::map<int, MultiPoly>& coeffs);
  MultiPoly coefficient_of(const std::string& var, int power) const;
  MultiPoly leading_coefficient_in(const std::string& var) const;

  /// Leading rational coefficient with respect to the canonical term order.
  Rat leading_coefficient() const;

  Rat eval(const std::map<std::string, Rat>& point) const;
  double eval_double(const std::map<std::string, double>& point) const;
  MultiPoly substitute(const std::string& var, const MultiPoly& replacement) const;

  /// Canonical rendering, e.g. "4*p1^4 - 5*p1^2*p2 + 1/3". parse() accepts
  /// exactly this grammar (plus redundant whitespace).
  std::string to_string() const;
  static MultiPoly parse(const std::string& text);

  bool operator==(const MultiPoly& o) const { return vars_ == o.vars_ && terms_ == o.terms_; }
  bool operator!=(const MultiPoly& o) const { return !(*this == o); }

  /// Flat double-precision evaluator for hot loops. Variable values are
  /// passed in the order of variables().
  struct Compiled {
    struct Term {
      std::vector<int> exp;
      double coef;
    };
    std::vector<Term> terms;
    int nvars = 0;
    double eval(const double* values) const;
  };
  Compiled compile() const;

  /// Internal representation accessors (used by the algebra layer).
  const std::map<std::vector<int>, Rat>& terms() const { return terms_; }

 private:
  void normalize();
  static void align(MultiPoly& a, MultiPoly& b);

  std::vector<std::string> vars_;            // sorted
  std::map<std::vector<int>, Rat> terms_;    // exponents -> nonzero coefficient
};

}  // namespace ewg

#endif
