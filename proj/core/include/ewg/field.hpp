#ifndef EWG_FIELD_HPP
#define EWG_FIELD_HPP

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ewg/linalg.hpp"
#include "ewg/stiffness.hpp"

namespace ewg {

/// Region the field lives on: an axis-aligned box or the annulus
/// { R <= |x| <= 1 } with 0 < R < 1.
struct Domain {
  enum class Kind { Box, Annulus };
  Kind kind = Kind::Annulus;
  int dim = 2;
  SmallVec lo, hi;        // box
  double inner_radius = 0.3;
  double outer_radius = 1.0;

  static Domain annulus(int dim, double inner_radius, double outer_radius = 1.0);
  static Domain box(const SmallVec& lo, const SmallVec& hi);

  /// Negative inside, positive outside, zero on the boundary.
  double signed_distance(const SmallVec& x) const;
  bool contains(const SmallVec& x, double tol = 0.0) const;
  double diameter() const;
};

/// Scalar profile of the radius: either closed-form polynomial coefficients
/// (ascending powers of r) or a sampled table with monotone cubic
/// (Fritsch-Carlson) interpolation.
class RadialProfile {
 public:
  static RadialProfile polynomial(std::vector<double> ascending_coeffs);
  static RadialProfile table(std::vector<double> r, std::vector<double> value);

  double operator()(double r) const;
  double derivative(double r) const;

 private:
  bool poly_ = true;
  std::vector<double> coeffs_;
  // pchip data
  std::vector<double> r_, v_, slope_;
};

/// Stiffness tensor field over a domain. Evaluation is reentrant and the
/// object is immutable after construction.
class StiffnessField {
 public:
  enum class Kind { Constant, IsotropicRadial, PerturbedIsotropic };

  static StiffnessField constant(const StiffnessD& c, Domain domain, int regularity = 99);
  static StiffnessField isotropic_radial(RadialProfile lambda, RadialProfile mu, Domain domain,
                                         int regularity);
  /// base isotropic (lambda0, mu0) plus a constant anisotropic delta.
  static StiffnessField perturbed_isotropic(double lambda0, double mu0, const StiffnessD& delta,
                                            Domain domain, int regularity = 99);

  Kind kind() const { return kind_; }
  int dim() const { return domain_.dim; }
  const Domain& domain() const { return domain_; }
  int regularity() const { return regularity_; }

  StiffnessD evaluate(const SmallVec& x) const;
  void evaluate_into(const SmallVec& x, StiffnessD& out) const;

  /// qP pressure speed profile c_P(r) = sqrt(lambda + 2 mu) for radial fields.
  bool is_isotropic() const;
  double lambda_at(double r) const;
  double mu_at(double r) const;

 private:
  StiffnessField(Kind kind, Domain domain, int regularity)
      : kind_(kind), domain_(domain), regularity_(regularity), base_(2), delta_(2) {}

  Kind kind_;
  Domain domain_;
  int regularity_;
  StiffnessD base_;   // constant part
  StiffnessD delta_;  // perturbation (zero unless perturbed)
  bool has_delta_ = false;
  double lambda0_ = 0, mu0_ = 0;
  std::shared_ptr<const RadialProfile> lambda_r_, mu_r_;
};

// --- field file format -------------------------------------------------------
//
// dim = 2
// kind = "isotropic-radial"     # "constant" | "isotropic-radial" | "perturbed-isotropic"
// regularity = 3
//
// [domain]
// type = "annulus"              # "annulus" | "box"
// inner_radius = 0.3
// outer_radius = 1
// # box instead uses: lo = "-1,-1" / hi = "1,1"
//
// [lambda]                      # isotropic-radial only
// poly = "0.72, -0.24, 0.02"    # or r_samples = "..." / values = "..."
// [mu]
// poly = "0.36"
//
// [tensor]                      # constant only: lambda/mu pair or quadruples
// lambda = 2
// mu = 1
//
// [base]                        # perturbed-isotropic only
// lambda = 2
// mu = 1
// [delta]                       # canonical quadruples, float values
// 1112 = 0.01

StiffnessField read_field_file(const std::string& path);
StiffnessField parse_field_text(const std::string& text, const std::string& origin = "<string>");

}  // namespace ewg

#endif
