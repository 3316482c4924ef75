#ifndef EWG_SINGULARITY_HPP
#define EWG_SINGULARITY_HPP

#include <vector>

#include "ewg/linalg.hpp"
#include "ewg/multipoly.hpp"
#include "ewg/stiffness.hpp"

namespace ewg {

struct SingularPoint {
  SmallVec p;
  double value;      // |P(p)| on the coefficient-normalized polynomial
  double grad_norm;  // ||grad P(p)|| likewise
};

enum class SingularSearch {
  Exact2D,       // resultant elimination, real roots, Newton polish
  SampledShell,  // radial root scan over sampled directions, Newton polish
};

struct SingularSearchConfig {
  int directions = 128;       // sampled representatives / ray count
  double shell_min = 1e-3;    // radial window for the sampled path
  double shell_max = 4.0;
  double residual_tol = 1e-9;        // accept ||(P, grad P)|| below this
  double candidate_grad_tol = 1e-3;  // pre-filter before Newton polish
};

/// Points where P = 0 and grad P = 0. For whole singular curves (the radical
/// divides the gradient ideal) sampled representatives are returned.
std::vector<SingularPoint> scheme_singular_points(const MultiPoly& P, SingularSearch search,
                                                  const SingularSearchConfig& cfg = {});

struct SmoothnessReport {
  bool scheme_smooth = false;
  bool variety_smooth = false;
  bool squarefree = false;
  std::vector<SingularPoint> scheme_singular_points;
  std::vector<SingularPoint> variety_singular_points;
};

/// Scheme check on P itself and on its squarefree part (the variety check).
SmoothnessReport variety_smoothness(const MultiPoly& P, SingularSearch search,
                                    const SingularSearchConfig& cfg = {});

struct DegeneracyEquivReport {
  int samples = 0;
  int flagged_both = 0;
  int eigen_only = 0;  // confusions
  int poly_only = 0;   // confusions
  bool consistent() const { return eigen_only == 0 && poly_only == 0; }
};

/// Over sampled unit directions (uniform grid plus refined near-degenerate
/// hits), compares the eigen-gap detector against the polynomial detector
/// {P = 0, grad P = 0} at momenta scaled onto the slowness surface.
DegeneracyEquivReport degeneracy_equiv_check(const StiffnessQ& c, int samples,
                                             double tol_gap = 1e-8, double tol_grad = 1e-6);

struct IsotropyCertificate {
  double epsilon = 0;
  double min_gap = 0;        // min over sampled p of (l1 - l2)/l1
  double max_deviation = 0;  // max over sampled unit p of ||p - (p.v1) v1||
  bool pass = false;         // min_gap above floor and max_deviation < epsilon
  SmallVec worst_gap_direction;
  SmallVec worst_deviation_direction;
};

/// Near-isotropic separateness certificate: the qP eigenspace stays
/// non-degenerate and within epsilon of the radial direction.
IsotropyCertificate near_isotropic_certificate(const StiffnessD& c0_isotropic,
                                               const StiffnessD& c, double epsilon, int samples,
                                               double gap_floor = 1e-10);

}  // namespace ewg

#endif
