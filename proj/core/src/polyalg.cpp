#include "ewg/polyalg.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ewg/errors.hpp"

namespace ewg {

namespace {

MultiPoly monomial(const std::vector<std::string>& vars, const std::vector<int>& exp,
                   const Rat& coef) {
  MultiPoly m = MultiPoly::constant(coef);
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (exp[i] > 0) m *= MultiPoly::variable(vars[i]).pow(exp[i]);
  return m;
}

}  // namespace

namespace {

// Term map of p re-expressed over the merged (sorted) variable list.
std::map<std::vector<int>, Rat> remap_terms(const MultiPoly& p,
                                            const std::vector<std::string>& vars) {
  std::vector<int> pos(p.variables().size());
  for (std::size_t i = 0; i < p.variables().size(); ++i)
    pos[i] = static_cast<int>(std::lower_bound(vars.begin(), vars.end(), p.variables()[i]) -
                              vars.begin());
  std::map<std::vector<int>, Rat> out;
  for (const auto& [exp, c] : p.terms()) {
    std::vector<int> ne(vars.size(), 0);
    for (std::size_t i = 0; i < exp.size(); ++i) ne[pos[i]] = exp[i];
    out[std::move(ne)] = c;
  }
  return out;
}

}  // namespace

std::optional<MultiPoly> try_divide_exact(const MultiPoly& f, const MultiPoly& g) {
  if (g.is_zero()) return std::nullopt;
  if (f.is_zero()) return MultiPoly();
  if (g.is_constant()) {
    MultiPoly q = f;
    q *= Rat(1) / g.constant_value();
    return q;
  }
  std::vector<std::string> vars;
  std::set_union(f.variables().begin(), f.variables().end(), g.variables().begin(),
                 g.variables().end(), std::back_inserter(vars));
  auto ft = remap_terms(f, vars);
  auto gt = remap_terms(g, vars);
  const std::vector<int>& ge = gt.rbegin()->first;
  const Rat& gc = gt.rbegin()->second;

  std::map<std::vector<int>, Rat> quot;
  while (!ft.empty()) {
    const auto& [re, rc] = *ft.rbegin();
    std::vector<int> de(re.size());
    for (std::size_t i = 0; i < re.size(); ++i) {
      de[i] = re[i] - ge[i];
      if (de[i] < 0) return std::nullopt;
    }
    Rat qc = rc / gc;
    quot[de] += qc;
    for (const auto& [e2, c2] : gt) {
      std::vector<int> se(de.size());
      for (std::size_t i = 0; i < de.size(); ++i) se[i] = de[i] + e2[i];
      auto it = ft.find(se);
      if (it == ft.end()) {
        ft.emplace(std::move(se), -qc * c2);
      } else {
        it->second -= qc * c2;
        if (it->second == 0) ft.erase(it);
      }
    }
  }
  MultiPoly q;
  for (const auto& [e, c] : quot)
    if (c != 0) q += monomial(vars, e, c);
  return q;
}

MultiPoly divide_exact(const MultiPoly& f, const MultiPoly& g) {
  auto q = try_divide_exact(f, g);
  if (!q) throw NumericalError("divide_exact: not divisible");
  return *q;
}

MultiPoly pseudo_remainder(const MultiPoly& f, const MultiPoly& g, const std::string& var) {
  int df = f.degree(var), dg = g.degree(var);
  if (g.is_zero()) throw NumericalError("pseudo_remainder: zero divisor");
  if (df < dg) {
    MultiPoly lc = g.leading_coefficient_in(var);
    return lc.pow(df - dg + 1 > 0 ? df - dg + 1 : 0) * f;
  }
  MultiPoly lcg = g.leading_coefficient_in(var);
  MultiPoly r = f;
  int e = df - dg + 1;
  const MultiPoly x = MultiPoly::variable(var);
  while (!r.is_zero() && r.degree(var) >= dg) {
    int dr = r.degree(var);
    MultiPoly lcr = r.leading_coefficient_in(var);
    r = lcg * r - lcr * x.pow(dr - dg) * g;
    --e;
  }
  if (e > 0) r = lcg.pow(e) * r;
  return r;
}

namespace {

// Integer content/lcm bookkeeping for normalize_primitive.
std::pair<mpz_class, mpz_class> coefficient_scaling(const MultiPoly& f) {
  mpz_class num_gcd = 0, den_lcm = 1;
  for (const auto& [exp, c] : f.terms()) {
    mpz_class num = c.get_num();
    mpz_class den = c.get_den();
    mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), num.get_mpz_t());
    mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), den.get_mpz_t());
  }
  return {num_gcd, den_lcm};
}

}  // namespace

MultiPoly normalize_primitive(const MultiPoly& f) {
  if (f.is_zero()) return f;
  auto [num_gcd, den_lcm] = coefficient_scaling(f);
  Rat scale(den_lcm, num_gcd);
  scale.canonicalize();
  MultiPoly out = f;
  out *= scale;
  if (out.leading_coefficient() < 0) out *= Rat(-1);
  return out;
}

MultiPoly content_in(const MultiPoly& f, const std::string& var) {
  if (f.is_zero()) return MultiPoly();
  auto coeffs = f.coefficients_in(var);
  std::vector<MultiPoly> list;
  list.reserve(coeffs.size());
  for (auto& [p, c] : coeffs) list.push_back(c);
  return poly_gcd(list);
}

MultiPoly primitive_part_in(const MultiPoly& f, const std::string& var) {
  if (f.is_zero()) return f;
  return divide_exact(f, content_in(f, var));
}

namespace {

MultiPoly gcd_impl(const MultiPoly& f, const MultiPoly& g);

// Subresultant PRS gcd of primitive inputs with positive degree in var.
MultiPoly prs_gcd(MultiPoly a, MultiPoly b, const std::string& var) {
  if (a.degree(var) < b.degree(var)) std::swap(a, b);
  MultiPoly g = MultiPoly::constant(1);
  MultiPoly h = MultiPoly::constant(1);
  for (;;) {
    int delta = a.degree(var) - b.degree(var);
    MultiPoly r = pseudo_remainder(a, b, var);
    if (r.is_zero()) return primitive_part_in(b, var);
    if (r.degree(var) == 0) return MultiPoly::constant(1);
    a = b;
    MultiPoly denom = g * h.pow(delta);
    auto q = try_divide_exact(r, denom);
    if (q) {
      b = *q;
    } else {
      // Defensive fallback to a primitive PRS step.
      b = primitive_part_in(r, var);
    }
    g = a.leading_coefficient_in(var);
    if (delta == 0) {
      // h unchanged
    } else if (delta == 1) {
      h = g;
    } else {
      auto hq = try_divide_exact(g.pow(delta), h.pow(delta - 1));
      h = hq ? *hq : g;
    }
  }
}

MultiPoly gcd_impl(const MultiPoly& f, const MultiPoly& g) {
  if (f.is_zero()) return normalize_primitive(g);
  if (g.is_zero()) return normalize_primitive(f);
  if (f.is_constant() || g.is_constant()) return MultiPoly::constant(1);

  // Main variable: first name used by either operand.
  std::string var = f.variables().empty() ? g.variables().front() : f.variables().front();
  if (!g.variables().empty() && g.variables().front() < var) var = g.variables().front();

  MultiPoly cf = content_in(f, var);
  MultiPoly cg = content_in(g, var);
  MultiPoly c = gcd_impl(cf, cg);
  MultiPoly fp = divide_exact(f, cf);
  MultiPoly gp = divide_exact(g, cg);

  int df = fp.degree(var), dg = gp.degree(var);
  if (df == 0 || dg == 0) return normalize_primitive(c);
  MultiPoly core = prs_gcd(fp, gp, var);
  return normalize_primitive(c * core);
}

}  // namespace

MultiPoly poly_gcd(const MultiPoly& f, const MultiPoly& g) { return gcd_impl(f, g); }

MultiPoly poly_gcd(const std::vector<MultiPoly>& polys) {
  MultiPoly acc;
  for (const auto& p : polys) {
    acc = poly_gcd(acc, p);
    if (acc.is_constant() && !acc.is_zero()) return MultiPoly::constant(1);
  }
  return acc;
}

namespace {

// Determinant by expansion along the first free row, memoized on the column
// mask. Sized for Sylvester matrices of low-degree inputs.
MultiPoly det_recursive(const std::vector<std::vector<MultiPoly>>& m, unsigned row,
                        unsigned colmask, std::map<unsigned, MultiPoly>& memo) {
  const unsigned n = static_cast<unsigned>(m.size());
  if (row == n) return MultiPoly::constant(1);
  auto it = memo.find(colmask);
  if (it != memo.end()) return it->second;
  MultiPoly det;
  int sign = 1;
  for (unsigned j = 0; j < n; ++j) {
    if (colmask & (1u << j)) continue;
    if (!m[row][j].is_zero()) {
      MultiPoly sub = det_recursive(m, row + 1, colmask | (1u << j), memo);
      MultiPoly term = m[row][j] * sub;
      if (sign < 0) term *= Rat(-1);
      det += term;
    }
    sign = -sign;
  }
  memo.emplace(colmask, det);
  return det;
}

MultiPoly sylvester_det(const MultiPoly& f, const MultiPoly& g, const std::string& var,
                        int df, int dg) {
  const int n = df + dg;
  if (n == 0) return MultiPoly::constant(1);
  if (n > 30) throw NumericalError("resultant: combined degree too large");
  auto fc = f.coefficients_in(var);
  auto gc = g.coefficients_in(var);
  auto coeff = [](const std::map<int, MultiPoly>& cs, int k) {
    auto it = cs.find(k);
    return it == cs.end() ? MultiPoly() : it->second;
  };
  std::vector<std::vector<MultiPoly>> m(n, std::vector<MultiPoly>(n));
  for (int r = 0; r < dg; ++r)
    for (int k = 0; k <= df; ++k) m[r][r + k] = coeff(fc, df - k);
  for (int r = 0; r < df; ++r)
    for (int k = 0; k <= dg; ++k) m[dg + r][r + k] = coeff(gc, dg - k);
  std::map<unsigned, MultiPoly> memo;
  return det_recursive(m, 0, 0, memo);
}

}  // namespace

MultiPoly resultant(const MultiPoly& f, const MultiPoly& g, const std::string& var) {
  if (f.is_zero() || g.is_zero()) throw InputError("resultant: zero polynomial");
  int df = f.degree(var), dg = g.degree(var);
  if (df <= 0 || dg <= 0) throw InputError("resultant: degree in " + var + " must be positive");
  return sylvester_det(f, g, var, df, dg);
}

MultiPoly resultant_formal(const MultiPoly& f, const MultiPoly& g, const std::string& var,
                           int deg_f, int deg_g) {
  if (deg_f < f.degree(var) || deg_g < g.degree(var))
    throw InputError("resultant_formal: declared degree below actual degree");
  if (deg_f <= 0 || deg_g <= 0) throw InputError("resultant_formal: need positive formal degrees");
  return sylvester_det(f, g, var, deg_f, deg_g);
}

MultiPoly discriminant(const MultiPoly& f, const std::string& var) {
  int d = f.degree(var);
  if (d < 2) throw InputError("discriminant: degree in " + var + " must be >= 2");
  MultiPoly df = f.derivative(var);
  MultiPoly res = sylvester_det(f, df, var, d, d - 1);
  MultiPoly lc = f.leading_coefficient_in(var);
  MultiPoly disc = divide_exact(res, lc);
  if ((static_cast<long>(d) * (d - 1) / 2) % 2 == 1) disc *= Rat(-1);
  return disc;
}

MultiPoly discriminant_formal_quadratic(const MultiPoly& f, const std::string& var) {
  if (f.degree(var) > 2) throw InputError("discriminant_formal_quadratic: degree above 2");
  MultiPoly a = f.coefficient_of(var, 2);
  MultiPoly b = f.coefficient_of(var, 1);
  MultiPoly c = f.coefficient_of(var, 0);
  return b * b - MultiPoly::constant(4) * a * c;
}

MultiPoly squarefree_part(const MultiPoly& f) {
  if (f.is_zero()) throw InputError("squarefree_part: zero polynomial");
  if (f.is_constant()) return MultiPoly::constant(1);
  std::vector<MultiPoly> list{f};
  for (const auto& v : f.variables()) {
    MultiPoly d = f.derivative(v);
    if (!d.is_zero()) list.push_back(d);
  }
  MultiPoly g = poly_gcd(list);
  return normalize_primitive(divide_exact(f, g));
}

bool is_squarefree(const MultiPoly& f) {
  if (f.is_zero()) throw InputError("is_squarefree: zero polynomial");
  if (f.is_constant()) return true;
  std::vector<MultiPoly> list{f};
  for (const auto& v : f.variables()) {
    MultiPoly d = f.derivative(v);
    if (!d.is_zero()) list.push_back(d);
  }
  return poly_gcd(list).is_constant();
}

namespace {

double horner(const std::vector<double>& c, double x) {
  double v = 0;
  for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
  return v;
}

// Bisection + final Newton polish inside a bracketing interval.
double refine_root(const std::vector<double>& c, const std::vector<double>& dc, double lo,
                   double hi) {
  double flo = horner(c, lo);
  double fhi = horner(c, hi);
  if (flo == 0) return lo;
  if (fhi == 0) return hi;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = horner(c, mid);
    if (fm == 0 || hi - lo < 1e-15 * std::max(1.0, std::abs(mid))) {
      lo = hi = mid;
      break;
    }
    if ((flo < 0) != (fm < 0)) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 4; ++it) {
    double fx = horner(c, x);
    double dfx = horner(dc, x);
    if (dfx == 0) break;
    double step = fx / dfx;
    if (!std::isfinite(step)) break;
    x -= step;
  }
  return x;
}

}  // namespace

std::vector<double> real_roots_double(std::vector<double> c) {
  // Trim numerically zero leading coefficients.
  double scale = 0;
  for (double v : c) scale = std::max(scale, std::abs(v));
  if (scale == 0) return {};
  while (c.size() > 1 && std::abs(c.back()) < 1e-14 * scale) c.pop_back();
  const int d = static_cast<int>(c.size()) - 1;
  if (d <= 0) return {};
  if (d == 1) return {-c[0] / c[1]};

  std::vector<double> dc(d);
  for (int i = 1; i <= d; ++i) dc[i - 1] = c[i] * i;
  std::vector<double> crit = real_roots_double(dc);
  std::sort(crit.begin(), crit.end());

  double bound = 0;
  for (int i = 0; i < d; ++i) bound = std::max(bound, std::abs(c[i] / c[d]));
  bound = 1.0 + bound;

  std::vector<double> pts{-bound};
  for (double x : crit)
    if (x > -bound && x < bound) pts.push_back(x);
  pts.push_back(bound);

  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double a = pts[i], b = pts[i + 1];
    double fa = horner(c, a), fb = horner(c, b);
    if (fa == 0) roots.push_back(a);
    if ((fa < 0) != (fb < 0)) roots.push_back(refine_root(c, dc, a, b));
  }
  double fb = horner(c, pts.back());
  if (fb == 0) roots.push_back(pts.back());
  // Critical points sitting on the axis (even-multiplicity roots).
  for (double x : crit) {
    double fx = horner(c, x);
    if (std::abs(fx) <= 1e-12 * std::max(1.0, scale * std::pow(std::abs(x) + 1.0, d)))
      roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-11; }),
              roots.end());
  return roots;
}

std::vector<double> real_roots(const MultiPoly& f, const std::string& var) {
  if (f.is_zero()) throw InputError("real_roots: zero polynomial");
  for (const auto& v : f.variables())
    if (v != var) throw InputError("real_roots: polynomial is not univariate in " + var);
  MultiPoly sf = squarefree_part(f);
  int d = sf.degree(var);
  std::vector<double> coeffs(d + 1, 0.0);
  for (const auto& [power, coeff] : sf.coefficients_in(var))
    coeffs[power] = rat_to_double(coeff.constant_value());
  return real_roots_double(std::move(coeffs));
}

}  // namespace ewg
