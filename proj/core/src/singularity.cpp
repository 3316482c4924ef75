#include "ewg/singularity.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ewg/christoffel.hpp"
#include "ewg/errors.hpp"
#include "ewg/polyalg.hpp"
#include "ewg/sampling.hpp"

namespace ewg {

namespace {

// Compiled polynomial with compiled partials, coefficient-normalized so the
// residual thresholds are scale free.
struct PolySystem {
  std::vector<std::string> vars;
  MultiPoly::Compiled value;
  std::vector<MultiPoly::Compiled> grad;
  std::vector<std::vector<MultiPoly::Compiled>> hess;
  int n = 0;
  double scale = 1.0;

  explicit PolySystem(const MultiPoly& P) {
    double maxc = 0.0;
    for (const auto& [e, c] : P.terms()) maxc = std::max(maxc, std::abs(rat_to_double(c)));
    scale = maxc > 0 ? 1.0 / maxc : 1.0;
    vars = P.variables();
    n = static_cast<int>(vars.size());
    value = P.compile();
    std::vector<MultiPoly> gpolys;
    for (int i = 0; i < n; ++i) {
      MultiPoly d = P.derivative(vars[i]);
      gpolys.push_back(d);
      grad.push_back(align_compile(d));
    }
    hess.assign(n, {});
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) hess[i].push_back(align_compile(gpolys[i].derivative(vars[j])));
  }

  // Derivatives may drop variables; recompile over the parent variable list.
  MultiPoly::Compiled align_compile(const MultiPoly& p) const {
    MultiPoly::Compiled out;
    out.nvars = n;
    for (const auto& [e, c] : p.terms()) {
      std::vector<int> exp(n, 0);
      for (std::size_t i = 0; i < p.variables().size(); ++i) {
        auto it = std::lower_bound(vars.begin(), vars.end(), p.variables()[i]);
        exp[it - vars.begin()] = e[i];
      }
      out.terms.push_back({exp, rat_to_double(c)});
    }
    return out;
  }

  double val(const double* x) const { return scale * value.eval(x); }
  SmallVec gradient(const double* x) const {
    SmallVec g(n);
    for (int i = 0; i < n; ++i) g[i] = scale * grad[i].eval(x);
    return g;
  }
  double residual(const double* x) const {
    double v = val(x);
    SmallVec g = gradient(x);
    return std::sqrt(v * v + dot(g, g));
  }
};

// Levenberg-damped Gauss-Newton on the square system (P, grad P).
bool polish(const PolySystem& sys, SmallVec& x, double tol) {
  const int n = sys.n;
  double mu = 1e-10;
  double res = sys.residual(x.data());
  for (int it = 0; it < 60 && res > tol * 1e-3; ++it) {
    SmallVec g = sys.gradient(x.data());
    double v = sys.val(x.data());
    SmallMat jt_j(n, n);
    SmallVec jt_f(n);
    for (int a = 0; a < n; ++a) {
      jt_f[a] += g[a] * v;
      for (int b = 0; b < n; ++b) jt_j(a, b) += g[a] * g[b];
    }
    for (int i = 0; i < n; ++i) {
      SmallVec hrow(n);
      for (int j = 0; j < n; ++j) hrow[j] = sys.scale * sys.hess[i][j].eval(x.data());
      for (int a = 0; a < n; ++a) {
        jt_f[a] += hrow[a] * g[i];
        for (int b = 0; b < n; ++b) jt_j(a, b) += hrow[a] * hrow[b];
      }
    }
    SmallMat damped = jt_j;
    for (int a = 0; a < n; ++a) damped(a, a) += mu * (1.0 + jt_j(a, a));
    SmallVec step(n);
    if (!solve_linear(damped, jt_f, step)) break;
    SmallVec trial = x - step;
    double tres = sys.residual(trial.data());
    if (tres < res) {
      x = trial;
      res = tres;
      mu = std::max(mu * 0.3, 1e-14);
    } else {
      mu *= 8.0;
      if (mu > 1e8) break;
    }
  }
  return res <= tol;
}

void dedup(std::vector<SingularPoint>& pts, double dist_tol) {
  std::vector<SingularPoint> out;
  for (const auto& p : pts) {
    bool dup = false;
    for (const auto& q : out)
      if (distance(p.p, q.p) < dist_tol) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(p);
  }
  pts = std::move(out);
}

SingularPoint make_point(const PolySystem& sys, const SmallVec& x) {
  SmallVec g = sys.gradient(x.data());
  return {x, std::abs(sys.val(x.data())), norm(g)};
}

// Coefficients of t -> g(t*u) where u lives in the coordinate space of
// full_vars.
std::vector<double> radial_coefficients(const MultiPoly& g,
                                        const std::vector<std::string>& full_vars,
                                        const SmallVec& u) {
  std::map<int, double> coeffs;
  const auto& gv = g.variables();
  std::vector<int> where(gv.size(), 0);
  for (std::size_t i = 0; i < gv.size(); ++i) {
    auto it = std::lower_bound(full_vars.begin(), full_vars.end(), gv[i]);
    where[i] = static_cast<int>(it - full_vars.begin());
  }
  for (const auto& [e, c] : g.terms()) {
    double w = rat_to_double(c);
    int total = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      w *= std::pow(u[where[i]], e[i]);
      total += e[i];
    }
    coeffs[total] += w;
  }
  int dmax = coeffs.empty() ? 0 : coeffs.rbegin()->first;
  std::vector<double> cv(dmax + 1, 0.0);
  for (auto& [d, w] : coeffs) cv[d] = w;
  return cv;
}

std::vector<SingularPoint> scan_rays(const MultiPoly& P, const PolySystem& sys,
                                     const MultiPoly& root_poly, const SingularSearchConfig& cfg,
                                     bool prefilter_gradient) {
  const auto& vars = P.variables();
  const int n = static_cast<int>(vars.size());
  std::vector<SingularPoint> found;
  for (const auto& u : unit_directions(n, cfg.directions)) {
    auto cv = radial_coefficients(root_poly, vars, u);
    double mag = 0.0;
    for (double w : cv) mag = std::max(mag, std::abs(w));
    if (mag == 0.0) continue;  // ray lies in the zero set; neighbors cover it
    for (double r : real_roots_double(cv)) {
      if (r < cfg.shell_min || r > cfg.shell_max) continue;
      SmallVec q = u * r;
      if (prefilter_gradient && norm(sys.gradient(q.data())) > cfg.candidate_grad_tol) continue;
      if (polish(sys, q, cfg.residual_tol)) found.push_back(make_point(sys, q));
    }
  }
  dedup(found, 1e-6);
  return found;
}

std::vector<SingularPoint> exact_2d(const MultiPoly& P, const SingularSearchConfig& cfg) {
  std::vector<std::string> vars = P.variables();
  if (vars.size() > 2) throw InputError("scheme_singular_points: exact path is two-dimensional");
  if (P.is_constant()) return {};
  std::string x = vars.size() > 0 ? vars[0] : "p1";
  std::string y = vars.size() > 1 ? vars[1] : "p2";

  MultiPoly Px = P.derivative(x);
  MultiPoly Py = P.derivative(y);
  PolySystem sys(P);

  // Whole singular curve: common factor of P and both partials.
  MultiPoly g = poly_gcd(poly_gcd(P, Px), Py);
  if (!g.is_constant() && !g.is_zero()) return scan_rays(P, sys, g, cfg, false);

  // Isolated candidates by eliminating one variable at a time.
  auto candidates_along = [&](const std::string& elim,
                              const std::string& keep) -> std::vector<double> {
    if (P.degree(elim) <= 0) return {};
    MultiPoly r1 = (Px.degree(elim) > 0) ? resultant(P, Px, elim) : Px;
    MultiPoly r2 = (Py.degree(elim) > 0) ? resultant(P, Py, elim) : Py;
    if (r1.is_zero() || r2.is_zero()) return {};
    MultiPoly h = poly_gcd(r1, r2);
    if (h.is_constant() || h.degree(keep) <= 0) return {};
    return real_roots(h, keep);
  };

  std::vector<SmallVec> seeds;
  auto add_seeds = [&](const std::string& keep, const std::string& solve_var, bool keep_is_y) {
    for (double kv : candidates_along(solve_var, keep)) {
      auto cs = P.coefficients_in(solve_var);
      int d = P.degree(solve_var);
      std::vector<double> cv(d + 1, 0.0);
      for (const auto& [pw, coeff] : cs) cv[pw] = coeff.eval_double({{keep, kv}});
      for (double sv : real_roots_double(cv))
        seeds.push_back(keep_is_y ? SmallVec{sv, kv} : SmallVec{kv, sv});
    }
  };
  add_seeds(y, x, true);
  add_seeds(x, y, false);

  std::vector<SingularPoint> found;
  for (SmallVec s : seeds) {
    if (sys.residual(s.data()) > 1e-2) continue;
    if (polish(sys, s, cfg.residual_tol)) found.push_back(make_point(sys, s));
  }
  dedup(found, 1e-7);
  return found;
}

}  // namespace

std::vector<SingularPoint> scheme_singular_points(const MultiPoly& P, SingularSearch search,
                                                  const SingularSearchConfig& cfg) {
  if (P.is_zero()) throw InputError("scheme_singular_points: zero polynomial");
  if (search == SingularSearch::Exact2D) return exact_2d(P, cfg);
  if (P.is_constant()) return {};
  PolySystem sys(P);
  return scan_rays(P, sys, P, cfg, true);
}

SmoothnessReport variety_smoothness(const MultiPoly& P, SingularSearch search,
                                    const SingularSearchConfig& cfg) {
  SmoothnessReport report;
  report.squarefree = is_squarefree(P);
  report.scheme_singular_points = scheme_singular_points(P, search, cfg);
  report.scheme_smooth = report.scheme_singular_points.empty();
  if (report.squarefree) {
    report.variety_singular_points = report.scheme_singular_points;
  } else {
    MultiPoly sf = squarefree_part(P);
    report.variety_singular_points = scheme_singular_points(sf, search, cfg);
  }
  report.variety_smooth = report.variety_singular_points.empty();
  return report;
}

DegeneracyEquivReport degeneracy_equiv_check(const StiffnessQ& c, int samples, double tol_gap,
                                             double tol_grad) {
  const int n = c.dim();
  StiffnessD cd = to_double(c);
  ValidationReport vr = validate(cd);
  if (!vr.ok()) throw InputError("degeneracy_equiv_check: tensor must be real positive definite");

  MultiPoly P = slowness_polynomial(c);
  PolySystem sys(P);

  std::vector<SmallVec> dirs = unit_directions(n, samples);
  // Refined near-degenerate directions join the sample so crossings are
  // probed at tolerance scale rather than at grid resolution.
  for (const auto& hit : degeneracy_scan(cd, {samples}, 1e-3)) dirs.push_back(hit);

  DegeneracyEquivReport report;
  report.samples = static_cast<int>(dirs.size());
  for (const auto& u : dirs) {
    EigenSystem es = eigen_sorted(cd, u);
    double l1 = es.values[0];
    double min_gap = 1e300;
    for (int i = 0; i + 1 < n; ++i)
      min_gap = std::min(min_gap, (es.values[i] - es.values[i + 1]) / l1);
    bool eigen_fires = min_gap < tol_gap;

    double min_grad = 1e300;
    for (int i = 0; i < n; ++i) {
      if (es.values[i] <= 0.0) continue;
      SmallVec q = u * (1.0 / std::sqrt(es.values[i]));
      min_grad = std::min(min_grad, norm(sys.gradient(q.data())));
    }
    bool poly_fires = min_grad < tol_grad;

    if (eigen_fires && poly_fires)
      ++report.flagged_both;
    else if (eigen_fires)
      ++report.eigen_only;
    else if (poly_fires)
      ++report.poly_only;
  }
  return report;
}

IsotropyCertificate near_isotropic_certificate(const StiffnessD& c0, const StiffnessD& c,
                                               double epsilon, int samples, double gap_floor) {
  if (epsilon <= 0) throw InputError("near_isotropic_certificate: epsilon must be positive");
  const int n = c0.dim();
  if (c.dim() != n) throw InputError("near_isotropic_certificate: dimension mismatch");

  StiffnessD iso = make_isotropic<double>(n, c0.at(0, 0, 1, 1), c0.at(0, 1, 0, 1));
  for (const auto& q : StiffnessD::canonical_quadruples(n)) {
    double a = c0.at(q[0], q[1], q[2], q[3]);
    double b = iso.at(q[0], q[1], q[2], q[3]);
    if (std::abs(a - b) > 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}))
      throw InputError("near_isotropic_certificate: base tensor is not isotropic");
  }
  if (!validate(c).symmetric)
    throw InputError("near_isotropic_certificate: tensor fails validation");

  IsotropyCertificate cert;
  cert.epsilon = epsilon;
  cert.min_gap = 2.0;
  cert.max_deviation = 0.0;
  for (const auto& u : unit_directions(n, samples)) {
    EigenSystem es = eigen_sorted(c, u);
    double gap = es.values[0] > 0 ? (es.values[0] - es.values[1]) / es.values[0] : 0.0;
    if (gap < cert.min_gap) {
      cert.min_gap = gap;
      cert.worst_gap_direction = u;
    }
    SmallVec v1 = es.vectors.col(0);
    SmallVec dev = u - v1 * dot(u, v1);
    double d = norm(dev);
    if (d > cert.max_deviation) {
      cert.max_deviation = d;
      cert.worst_deviation_direction = u;
    }
  }
  cert.pass = cert.min_gap > gap_floor && cert.max_deviation < epsilon;
  return cert;
}

}  // namespace ewg
