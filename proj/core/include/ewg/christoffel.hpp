#ifndef EWG_CHRISTOFFEL_HPP
#define EWG_CHRISTOFFEL_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "ewg/linalg.hpp"
#include "ewg/multipoly.hpp"
#include "ewg/stiffness.hpp"

namespace ewg {

/// Momentum variable names of the symbolic paths: p1, p2, p3.
std::string momentum_var(int i);

/// Gamma_il(p) = sum_jk c_ijkl p_j p_k. Symmetric, 2-homogeneous in p.
SmallMat christoffel_matrix(const StiffnessD& c, const SmallVec& p);

/// Symbolic Christoffel matrix: entries are quadratic forms in p1..pn with
/// exact rational coefficients.
std::vector<std::vector<MultiPoly>> christoffel_symbolic(const StiffnessQ& c);

/// Exact slowness polynomial P_c(p) = det(Gamma_c(p) - Id), the characteristic
/// polynomial of the Christoffel matrix at eigenvalue 1; its vanishing set is
/// the slowness surface. Exact path supports n in {2, 3}.
MultiPoly slowness_polynomial(const StiffnessQ& c);

/// Numeric det(Gamma(p) - Id) for any dimension.
double slowness_eval(const StiffnessD& c, const SmallVec& p);

struct EigenSystem {
  SmallVec values;   // descending
  SmallMat vectors;  // columns
  double residual;
};

/// Eigen decomposition of Gamma(c, p) by cyclic Jacobi rotations.
/// Throws InputError for p = 0.
EigenSystem eigen_sorted(const StiffnessD& c, const SmallVec& p);

struct GapReport {
  double min_gap = 0;          // min over directions of (l1 - l2)/l1
  SmallVec argmin_direction;
  int samples = 0;
  bool valid = false;          // false when l1 <= 0 somewhere (non-PD tensor)
  double lipschitz_margin = 0;  // min_gap minus observed slope * half mesh width
  std::string note;
};

struct SphereSampling {
  int count = 0;  // 0 = default (1024 on S^1, 2048 on S^2)
};

/// Minimum relative qP gap over sampled unit directions.
GapReport qp_gap_margin(const StiffnessD& c, SphereSampling sampling = {});

/// Field version: minimum over sampled base points and directions.
class StiffnessField;
GapReport qp_gap_margin(const StiffnessField& field, SphereSampling sampling = {},
                        int point_samples = 64);

/// Unit directions where some adjacent eigenvalue pair has relative gap below
/// tol, refined by golden-section minimization of the pair gap.
std::vector<SmallVec> degeneracy_scan(const StiffnessD& c, SphereSampling sampling, double tol);

/// CSV sweep of the eigenvalues over directions:
/// theta[,phi],lambda1,lambda2[,lambda3],rel_gap
void write_gap_csv(std::ostream& os, const StiffnessD& c, int samples);

}  // namespace ewg

#endif
