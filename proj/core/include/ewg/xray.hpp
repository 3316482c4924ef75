#ifndef EWG_XRAY_HPP
#define EWG_XRAY_HPP

#include <functional>
#include <string>
#include <vector>

#include "ewg/geodesics.hpp"

namespace ewg {

/// Scalar integrand over the domain: constants, radial polynomials, separable
/// radial x angular elements and linear combinations of those.
class ScalarField {
 public:
  static ScalarField constant(double value);
  static ScalarField radial_polynomial(std::vector<double> ascending_coeffs);
  /// radial(r) * cos(k theta) or radial(r) * sin(k theta), theta in the
  /// e1-e2 plane.
  static ScalarField separable(std::vector<double> radial_coeffs, int harmonic, bool sine);
  static ScalarField combination(const std::vector<double>& weights,
                                 const std::vector<ScalarField>& parts);

  double operator()(const SmallVec& x) const { return eval_(x); }

  /// Parses "1", "r", "r^2", ... into radial monomials.
  static ScalarField parse_token(const std::string& token);

 private:
  std::function<double(const SmallVec&)> eval_;
};

struct XRayValue {
  double integral = 0;
  double error_estimate = 0;  // step-halving estimate of the quadrature error
};

/// Integral of f along a complete boundary-to-boundary path by composite
/// Simpson over the stored samples, with a Simpson correction on the short
/// bisected exit interval. Throws InputError on incomplete paths.
XRayValue forward_xray(const ScalarField& f, const GeodesicPath& path);

struct XRayRow {
  SmallVec boundary_point;
  double angle = 0;  // takeoff angle relative to the inward normal
  double integral = 0;
  double error_estimate = 0;
  bool ok = false;  // false for rays that failed to return to the boundary
};

struct XRayFan {
  int boundary_points = 64;
  int takeoff_angles = 16;
  double h = 5e-3;
};

struct XRayDataset {
  std::vector<XRayRow> rows;
  int flagged = 0;
};

/// One row per fan member: boundary starts on the outer circle, inward takeoff
/// angles spread over (-pi/2, pi/2) around the inward normal. Flagged rows are
/// kept with ok = false. Two-dimensional annulus geometries.
XRayDataset xray_dataset(const QpGeometry& geom, const ScalarField& f, const XRayFan& fan,
                         int threads = 1);

struct InjectivityReport {
  double sigma_min = 0;
  double cond = 0;
  double recovery_rel_err = 0;  // weighted L2 over the annulus
  bool rank_deficient = false;
  int rows_used = 0;
};

/// Desk-scale injectivity experiment: build A[ray, basis] of forward
/// integrals, report the smallest singular value and the least-squares
/// recovery error of a held-out synthetic combination (forward-mapped through
/// the quadrature, not through A).
InjectivityReport desk_injectivity_experiment(const QpGeometry& geom,
                                              const std::vector<ScalarField>& basis,
                                              const XRayFan& fan, int threads = 1);

void write_dataset_csv(std::ostream& os, const XRayDataset& dataset);

}  // namespace ewg

#endif
