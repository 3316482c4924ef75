#include "ewg/finsler.hpp"

#include <cmath>
#include <random>

#include "ewg/christoffel.hpp"
#include "ewg/errors.hpp"
#include "ewg/sampling.hpp"

namespace ewg {

struct QpGeometry::EigenData {
  SmallVec values;
  SmallMat vectors;
  double gap = 0;
};

namespace {

thread_local StiffnessD tl_tensor(2);

const StiffnessD& field_at(const StiffnessField& field, const SmallVec& x) {
  if (tl_tensor.dim() != field.dim()) tl_tensor = StiffnessD(field.dim());
  field.evaluate_into(x, tl_tensor);
  return tl_tensor;
}

// dGamma_{ab}/dp_m = sum_k c_{a m k b} p_k + sum_j c_{a j m b} p_j
SmallMat dgamma_dp(const StiffnessD& c, const SmallVec& p, int m) {
  const int n = c.dim();
  SmallMat d(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += c.at(a, m, k, b) * p[k];
      for (int j = 0; j < n; ++j) s += c.at(a, j, m, b) * p[j];
      d(a, b) = s;
    }
  return d;
}

}  // namespace

QpGeometry::QpGeometry(const StiffnessField& field, FinslerConfig cfg)
    : field_(&field), cfg_(cfg) {}

QpGeometry::EigenData QpGeometry::eigen_at(const SmallVec& x, const SmallVec& p) const {
  if (norm(p) == 0.0) throw InputError("qp geometry: p must be nonzero");
  const StiffnessD& c = field_at(*field_, x);
  SymEigen es = jacobi_eigen(christoffel_matrix(c, p));
  EigenData ed;
  ed.values = es.values;
  ed.vectors = es.vectors;
  if (es.values[0] <= 0.0)
    throw NumericalError("qp geometry: leading eigenvalue is not positive");
  ed.gap = (es.values[0] - es.values[1]) / es.values[0];
  if (ed.gap < cfg_.gap_floor)
    throw DegenerateDirectionError("qP eigenvalue is degenerate at the requested direction (gap " +
                                   std::to_string(ed.gap) + ")");
  return ed;
}

double QpGeometry::hamiltonian(const SmallVec& x, const SmallVec& p) const {
  return eigen_at(x, p).values[0];
}

SmallVec QpGeometry::hamiltonian_gradient_p(const SmallVec& x, const SmallVec& p) const {
  EigenData ed = eigen_at(x, p);
  const StiffnessD& c = field_at(*field_, x);
  const int n = dim();
  SmallVec v1 = ed.vectors.col(0);
  SmallVec grad(n);
  for (int m = 0; m < n; ++m) grad[m] = dot(v1, matvec(dgamma_dp(c, p, m), v1));
  return grad;
}

SmallMat QpGeometry::hessian_from_eigen(const EigenData& ed, const SmallVec& x,
                                        const SmallVec& p) const {
  const StiffnessD& c = field_at(*field_, x);
  const int n = dim();
  SmallVec v1 = ed.vectors.col(0);

  // w[m][j] = v1 . (dGamma/dp_m) v_j
  std::array<SmallVec, SmallVec::kCapacity> w;
  for (int m = 0; m < n; ++m) {
    SmallMat dg = dgamma_dp(c, p, m);
    SmallVec row(n);
    for (int j = 0; j < n; ++j) row[j] = dot(v1, matvec(dg, ed.vectors.col(j)));
    w[m] = row;
  }

  SmallMat h(n, n);
  for (int m = 0; m < n; ++m)
    for (int q = m; q < n; ++q) {
      // d2Gamma_{ab}/dp_m dp_q = c_{a m q b} + c_{a q m b}
      double s = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          s += v1[a] * (c.at(a, m, q, b) + c.at(a, q, m, b)) * v1[b];
      for (int j = 1; j < n; ++j)
        s += 2.0 * w[m][j] * w[q][j] / (ed.values[0] - ed.values[j]);
      h(m, q) = s;
      h(q, m) = s;
    }
  return h;
}

SmallMat QpGeometry::hamiltonian_hessian_p(const SmallVec& x, const SmallVec& p) const {
  EigenData ed = eigen_at(x, p);
  return hessian_from_eigen(ed, x, p);
}

SmallVec QpGeometry::legendre_forward(const SmallVec& x, const SmallVec& p) const {
  SmallVec g = hamiltonian_gradient_p(x, p);
  return g * 0.5;
}

QpGeometry::InverseResult QpGeometry::legendre_inverse(const SmallVec& x, const SmallVec& y,
                                                       const SmallVec* initial) const {
  const int n = dim();
  if (norm(y) == 0.0) throw InputError("legendre_inverse: y must be nonzero");
  const double ynorm = norm(y);

  auto seed_from_direction = [&](const SmallVec& dir) {
    SmallVec p = dir * (1.0 / std::max(norm(dir), 1e-300));
    double lam = hamiltonian(x, p);
    p *= 1.0 / (2.0 * lam);
    SmallVec f = legendre_forward(x, p);
    double fn = norm(f);
    if (fn > 0) p *= ynorm / fn;  // 1-homogeneity of the forward map
    return p;
  };

  InverseResult best;
  best.residual = 1e300;

  auto run_newton = [&](SmallVec p) {
    InverseResult out;
    SmallVec r = legendre_forward(x, p) - y;
    double res = norm(r) / ynorm;
    for (int it = 0; it < cfg_.newton_max_iter && res > cfg_.newton_tol; ++it) {
      EigenData ed = eigen_at(x, p);
      SmallMat jac = hessian_from_eigen(ed, x, p);
      jac *= 0.5;  // forward = grad(lambda/2)
      SmallVec step(n);
      if (!solve_linear(jac, r, step)) break;
      double t = 1.0;
      SmallVec trial;
      double tres = res;
      for (; t > 1.0 / 1024.0; t *= 0.5) {
        trial = p - step * t;
        if (norm(trial) == 0.0) continue;
        try {
          tres = norm(legendre_forward(x, trial) - y) / ynorm;
        } catch (const NumericalError&) {
          continue;
        }
        if (tres < res * (1.0 - 0.25 * t)) break;
      }
      if (tres >= res) break;
      p = trial;
      res = tres;
      out.iterations = it + 1;
    }
    out.p = p;
    out.residual = res;
    out.converged = res <= cfg_.newton_tol;
    return out;
  };

  std::array<SmallVec, 9> seeds;
  int n_seeds = 0;
  if (initial != nullptr && norm(*initial) > 0) seeds[n_seeds++] = *initial;
  seeds[n_seeds++] = seed_from_direction(y);
  for (int axis = 0; axis < n && n_seeds < 9; ++axis) {
    SmallVec blend = normalized(y);
    blend[axis] += 0.5;
    seeds[n_seeds++] = seed_from_direction(blend);
  }

  for (int s = 0; s < n_seeds; ++s) {
    SmallVec p0 = seeds[s];
    if (s > 0 && norm(p0) == 0.0) continue;
    InverseResult r;
    try {
      r = run_newton(p0);
    } catch (const NumericalError&) {
      continue;
    }
    if (r.converged) return r;
    if (r.residual < best.residual) best = r;
  }
  return best;
}

double QpGeometry::finsler(const SmallVec& x, const SmallVec& y) const {
  InverseResult ir = legendre_inverse(x, y);
  if (!ir.converged)
    throw NumericalError("finsler: Legendre inversion did not converge (residual " +
                         std::to_string(ir.residual) + ")");
  return std::sqrt(hamiltonian(x, ir.p));
}

FundamentalTensorSample QpGeometry::fundamental_tensor(const SmallVec& x,
                                                       const SmallVec& y) const {
  const int n = dim();
  const double h = cfg_.fd_step_y * norm(y);
  if (h == 0.0) throw InputError("fundamental_tensor: y must be nonzero");

  // Warm starts propagate the inverse across the FD stencil.
  InverseResult center = legendre_inverse(x, y);
  if (!center.converged) throw NumericalError("fundamental_tensor: Legendre inversion failed");
  auto phi = [&](const SmallVec& yy) {  // (1/2) F^2
    InverseResult ir = legendre_inverse(x, yy, &center.p);
    if (!ir.converged) throw NumericalError("fundamental_tensor: Legendre inversion failed");
    return 0.5 * hamiltonian(x, ir.p);
  };

  const double phi0 = phi(y);
  SmallMat g(n, n);
  for (int i = 0; i < n; ++i) {
    SmallVec yp = y, ym = y;
    yp[i] += h;
    ym[i] -= h;
    g(i, i) = (phi(yp) - 2.0 * phi0 + phi(ym)) / (h * h);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      SmallVec pp = y, pm = y, mp = y, mm = y;
      pp[i] += h;
      pp[j] += h;
      pm[i] += h;
      pm[j] -= h;
      mp[i] -= h;
      mp[j] += h;
      mm[i] -= h;
      mm[j] -= h;
      double v = (phi(pp) - phi(pm) - phi(mp) + phi(mm)) / (4.0 * h * h);
      g(i, j) = v;
      g(j, i) = v;
    }

  SymEigen es = jacobi_eigen(g);
  if (es.values[n - 1] <= 0.0)
    throw NumericalError("fundamental_tensor: loss of strong convexity (non-PD fiber Hessian)");
  FundamentalTensorSample out;
  out.g = g;
  out.condition = es.values[0] / es.values[n - 1];
  return out;
}

FundamentalTensorSample QpGeometry::fundamental_tensor_dual_impl(const SmallVec& x,
                                                              const SmallVec& y,
                                                              const SmallVec* hint) const {
  InverseResult ir = legendre_inverse(x, y, hint);
  if (!ir.converged)
    throw NumericalError("fundamental_tensor_dual: Legendre inversion failed");
  EigenData ed = eigen_at(x, ir.p);
  SmallMat hess = hessian_from_eigen(ed, x, ir.p);
  hess *= 0.5;
  SmallMat g;
  if (!invert(hess, g))
    throw NumericalError("fundamental_tensor_dual: fiber Hessian is singular");
  const int n = dim();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double v = 0.5 * (g(i, j) + g(j, i));
      g(i, j) = v;
      g(j, i) = v;
    }
  SymEigen es = jacobi_eigen(g);
  if (es.values[n - 1] <= 0.0)
    throw NumericalError("fundamental_tensor_dual: loss of strong convexity");
  FundamentalTensorSample out;
  out.g = g;
  out.condition = es.values[0] / es.values[n - 1];
  return out;
}

FundamentalTensorSample QpGeometry::fundamental_tensor_dual(const SmallVec& x,
                                                            const SmallVec& y) const {
  return fundamental_tensor_dual_impl(x, y, nullptr);
}

SmallVec QpGeometry::spray(const SmallVec& x, const SmallVec& y) const {
  const int n = dim();
  const double delta = cfg_.fd_step_x * field_->domain().diameter();

  InverseResult center = legendre_inverse(x, y);
  if (!center.converged) throw NumericalError("spray: Legendre inversion failed");
  FundamentalTensorSample g0 = fundamental_tensor_dual_impl(x, y, &center.p);

  // dg[l] = dg/dx^l by central differences, warm-started from the center.
  std::array<SmallMat, SmallVec::kCapacity> dg;
  for (int l = 0; l < n; ++l) {
    SmallVec xp = x, xm = x;
    xp[l] += delta;
    xm[l] -= delta;
    FundamentalTensorSample gp = fundamental_tensor_dual_impl(xp, y, &center.p);
    FundamentalTensorSample gm = fundamental_tensor_dual_impl(xm, y, &center.p);
    SmallMat d = gp.g;
    d -= gm.g;
    d *= 1.0 / (2.0 * delta);
    dg[l] = d;
  }

  // w_j = (2 d_l g_{jk} - d_j g_{kl}) y^k y^l
  SmallVec w(n);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        s += (2.0 * dg[l](j, k) - dg[j](k, l)) * y[k] * y[l];
    w[j] = s;
  }

  SmallMat ginv;
  if (!invert(g0.g, ginv)) throw NumericalError("spray: fundamental tensor is singular");
  SmallVec G = matvec(ginv, w);
  G *= 0.25;
  return G;
}

bool BatteryResult::pass(double tol_roundtrip, double tol_grad) const {
  return samples > 0 && g_pd_failures == 0 && legendre_roundtrip <= tol_roundtrip &&
         grad_analytic_vs_fd <= tol_grad && homogeneity_f <= 1e-10 &&
         euler_hamiltonian <= 1e-8 && g_euler <= 1e-6 &&
         (isotropic_closed_form <= 1e-10);
}

BatteryResult finsler_battery(const QpGeometry& geom, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int n = geom.dim();
  const Domain& dom = geom.field().domain();
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  auto random_point = [&]() {
    for (;;) {
      SmallVec x(n);
      if (dom.kind == Domain::Kind::Annulus) {
        double r = dom.inner_radius + (dom.outer_radius - dom.inner_radius) * unif(rng);
        SmallVec u = random_unit_vector(rng, n);
        x = u * r;
      } else {
        for (int i = 0; i < n; ++i) x[i] = dom.lo[i] + (dom.hi[i] - dom.lo[i]) * unif(rng);
      }
      if (dom.contains(x, -1e-9)) return x;
    }
  };

  BatteryResult out;
  out.samples = samples;
  const bool isotropic = geom.field().is_isotropic();

  for (int s = 0; s < samples; ++s) {
    SmallVec x = random_point();
    SmallVec y = random_unit_vector(rng, n) * (0.5 + 1.5 * unif(rng));
    SmallVec p = random_unit_vector(rng, n) * (0.5 + 1.5 * unif(rng));

    // Euler identity for the 2-homogeneous Hamiltonian.
    double lam = geom.hamiltonian(x, p);
    SmallVec grad = geom.hamiltonian_gradient_p(x, p);
    out.euler_hamiltonian =
        std::max(out.euler_hamiltonian, std::abs(dot(p, grad) - 2.0 * lam) / lam);

    // Analytic gradient against central differences.
    double hg = 1e-6 * norm(p);
    for (int i = 0; i < n; ++i) {
      SmallVec pp = p, pm = p;
      pp[i] += hg;
      pm[i] -= hg;
      double fd = (geom.hamiltonian(x, pp) - geom.hamiltonian(x, pm)) / (2.0 * hg);
      double scale = std::max(1.0, std::abs(grad[i]));
      out.grad_analytic_vs_fd =
          std::max(out.grad_analytic_vs_fd, std::abs(fd - grad[i]) / scale);
    }

    // Homogeneity of F.
    double f1 = geom.finsler(x, y);
    double t = 0.5 + 2.0 * unif(rng);
    double f2 = geom.finsler(x, y * t);
    out.homogeneity_f = std::max(out.homogeneity_f, std::abs(f2 - t * f1) / (t * f1));

    // Legendre round trip.
    auto ir = geom.legendre_inverse(x, y);
    if (ir.converged) {
      SmallVec back = geom.legendre_forward(x, ir.p);
      out.legendre_roundtrip =
          std::max(out.legendre_roundtrip, norm(back - y) / norm(y));
    } else {
      out.legendre_roundtrip = 1.0;
    }

    // Fundamental tensor: PD, Euler identity, route agreement.
    try {
      auto gfd = geom.fundamental_tensor(x, y);
      double gyy = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) gyy += gfd.g(i, j) * y[i] * y[j];
      out.g_euler = std::max(out.g_euler, std::abs(gyy - f1 * f1) / (f1 * f1));
      auto gdual = geom.fundamental_tensor_dual(x, y);
      SmallMat diff = gfd.g;
      diff -= gdual.g;
      out.g_dual_vs_fd =
          std::max(out.g_dual_vs_fd, max_abs(diff) / std::max(1e-300, max_abs(gdual.g)));
    } catch (const NumericalError&) {
      ++out.g_pd_failures;
    }

    if (isotropic) {
      double r = norm(x);
      double cp = std::sqrt(geom.field().lambda_at(r) + 2.0 * geom.field().mu_at(r));
      out.isotropic_closed_form =
          std::max(out.isotropic_closed_form, std::abs(f1 - norm(y) / cp) / f1);
    }
  }
  return out;
}

}  // namespace ewg
