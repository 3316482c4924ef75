#ifndef EWG_FINSLER_HPP
#define EWG_FINSLER_HPP

#include <cstdint>
#include <optional>

#include "ewg/field.hpp"
#include "ewg/linalg.hpp"

namespace ewg {

struct FinslerConfig {
  double fd_step_y = 1e-4;   // fundamental-tensor FD step, relative to |y|
  double fd_step_x = 1e-5;   // spray x-derivative step, relative to domain diameter
  double gap_floor = 1e-12;  // refuse directions whose relative qP gap is below this
  int newton_max_iter = 60;
  double newton_tol = 1e-12;  // relative forward residual for the Legendre inverse
};

struct FundamentalTensorSample {
  SmallMat g;
  double condition = 0;
};

/// qP geometry of a stiffness field: the largest Christoffel eigenvalue as a
/// cotangent Hamiltonian, the Legendre transfer to the tangent bundle, the
/// induced Finsler norm, its fundamental tensor and the geodesic spray.
/// Evaluations are reentrant; distinct threads may share one instance.
class QpGeometry {
 public:
  explicit QpGeometry(const StiffnessField& field, FinslerConfig cfg = {});

  const StiffnessField& field() const { return *field_; }
  const FinslerConfig& config() const { return cfg_; }
  int dim() const { return field_->dim(); }

  /// Largest eigenvalue of Gamma_{c(x)}(p); 2-homogeneous in p. Throws
  /// DegenerateDirectionError when the relative gap drops below gap_floor.
  double hamiltonian(const SmallVec& x, const SmallVec& p) const;

  /// Analytic gradient of the eigenvalue (first-order perturbation, valid on
  /// the simple qP branch).
  SmallVec hamiltonian_gradient_p(const SmallVec& x, const SmallVec& p) const;

  /// Analytic fiber Hessian of the eigenvalue (second-order perturbation).
  SmallMat hamiltonian_hessian_p(const SmallVec& x, const SmallVec& p) const;

  /// y = grad_p (lambda/2): the Legendre image of the covector p.
  SmallVec legendre_forward(const SmallVec& x, const SmallVec& p) const;

  struct InverseResult {
    SmallVec p;
    bool converged = false;
    int iterations = 0;
    double residual = 0;  // |forward(p) - y| / |y|
  };

  /// Damped Newton inversion of the forward map; optional warm start.
  InverseResult legendre_inverse(const SmallVec& x, const SmallVec& y,
                                 const SmallVec* initial = nullptr) const;

  /// F(x, y) = sqrt(lambda_qP(x, p)) at p = inverse image of y. Positive and
  /// 1-homogeneous in y. Throws NumericalError when the inversion fails.
  double finsler(const SmallVec& x, const SmallVec& y) const;

  /// Fundamental tensor by central second differences of F^2 (step
  /// fd_step_y * |y|), symmetrized; throws NumericalError when the result is
  /// not positive definite.
  FundamentalTensorSample fundamental_tensor(const SmallVec& x, const SmallVec& y) const;

  /// Fundamental tensor through the dual route: inverse of the analytic fiber
  /// Hessian of lambda/2 at the Legendre preimage. Agrees with the FD route to
  /// discretization error and is what the integrator uses.
  FundamentalTensorSample fundamental_tensor_dual(const SmallVec& x, const SmallVec& y) const;

  /// Spray coefficients G^i(x,y) = 1/4 g^{ij}(2 d_l g_{jk} - d_j g_{kl}) y^k y^l
  /// with d/dx by central differences of the dual-route fundamental tensor.
  SmallVec spray(const SmallVec& x, const SmallVec& y) const;

 private:
  struct EigenData;
  EigenData eigen_at(const SmallVec& x, const SmallVec& p) const;
  SmallMat hessian_from_eigen(const EigenData& ed, const SmallVec& x, const SmallVec& p) const;
  FundamentalTensorSample fundamental_tensor_dual_impl(const SmallVec& x, const SmallVec& y,
                                                       const SmallVec* hint) const;

  const StiffnessField* field_;
  FinslerConfig cfg_;
};

/// Invariant battery over random admissible samples; worst-case residuals.
struct BatteryResult {
  int samples = 0;
  double homogeneity_f = 0;        // |F(ty) - tF(y)| / tF(y)
  double euler_hamiltonian = 0;    // |p.grad - 2 lambda| / lambda
  double legendre_roundtrip = 0;   // |forward(inverse(y)) - y| / |y|
  double grad_analytic_vs_fd = 0;  // eigenvalue gradient cross-check
  double g_euler = 0;              // |g(y,y) - F^2| / F^2
  double g_dual_vs_fd = 0;         // fundamental tensor route agreement
  int g_pd_failures = 0;
  double isotropic_closed_form = 0;  // |F - |y|/c_P| / F, isotropic fields only
  bool pass(double tol_roundtrip = 1e-8, double tol_grad = 1e-6) const;
};

BatteryResult finsler_battery(const QpGeometry& geom, int samples, std::uint64_t seed);

}  // namespace ewg

#endif
