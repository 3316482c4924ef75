#include "ewg/xray.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "ewg/errors.hpp"
#include "ewg/io.hpp"
#include "ewg/threadpool.hpp"

namespace ewg {

ScalarField ScalarField::constant(double value) {
  ScalarField f;
  f.eval_ = [value](const SmallVec&) { return value; };
  return f;
}

ScalarField ScalarField::radial_polynomial(std::vector<double> coeffs) {
  ScalarField f;
  f.eval_ = [c = std::move(coeffs)](const SmallVec& x) {
    double r = norm(x);
    double v = 0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * r + c[i];
    return v;
  };
  return f;
}

ScalarField ScalarField::separable(std::vector<double> radial_coeffs, int harmonic, bool sine) {
  ScalarField f;
  f.eval_ = [c = std::move(radial_coeffs), harmonic, sine](const SmallVec& x) {
    double r = norm(x);
    double radial = 0;
    for (std::size_t i = c.size(); i-- > 0;) radial = radial * r + c[i];
    double theta = std::atan2(x[1], x[0]);
    return radial * (sine ? std::sin(harmonic * theta) : std::cos(harmonic * theta));
  };
  return f;
}

ScalarField ScalarField::combination(const std::vector<double>& weights,
                                     const std::vector<ScalarField>& parts) {
  if (weights.size() != parts.size())
    throw InputError("ScalarField::combination: weight/part count mismatch");
  ScalarField f;
  f.eval_ = [weights, parts](const SmallVec& x) {
    double v = 0;
    for (std::size_t i = 0; i < parts.size(); ++i) v += weights[i] * parts[i](x);
    return v;
  };
  return f;
}

ScalarField ScalarField::parse_token(const std::string& token) {
  std::string t;
  for (char ch : token)
    if (!std::isspace(static_cast<unsigned char>(ch))) t.push_back(ch);
  if (t == "1") return constant(1.0);
  if (t == "r") return radial_polynomial({0.0, 1.0});
  if (t.rfind("r^", 0) == 0) {
    int k = std::stoi(t.substr(2));
    if (k < 0 || k > 16) throw InputError("scalar token: power out of range: " + token);
    std::vector<double> c(k + 1, 0.0);
    c[k] = 1.0;
    return radial_polynomial(std::move(c));
  }
  try {
    std::size_t pos = 0;
    double v = std::stod(t, &pos);
    if (pos == t.size()) return constant(v);
  } catch (const std::exception&) {
  }
  throw InputError("scalar token: expected \"1\", \"r\", \"r^k\" or a number, got: " + token);
}

namespace {

double simpson_uniform(const std::vector<double>& v, double h, std::size_t lo, std::size_t hi) {
  // [lo, hi] with an even interval count.
  double s = v[lo] + v[hi];
  for (std::size_t i = lo + 1; i < hi; ++i) s += (((i - lo) % 2) ? 4.0 : 2.0) * v[i];
  return s * h / 3.0;
}

// Composite Simpson over the uniform samples; a 3/8 block absorbs an odd
// interval count.
double integrate_samples(const std::vector<double>& v, double h) {
  const std::size_t m = v.size() - 1;  // intervals
  if (m == 0) return 0;
  if (m == 1) return 0.5 * h * (v[0] + v[1]);
  if (m == 2) return simpson_uniform(v, h, 0, 2);
  if (m % 2 == 0) return simpson_uniform(v, h, 0, m);
  double head = simpson_uniform(v, h, 0, m - 3);
  double tail = 3.0 * h / 8.0 * (v[m - 3] + 3.0 * v[m - 2] + 3.0 * v[m - 1] + v[m]);
  return head + tail;
}

}  // namespace

XRayValue forward_xray(const ScalarField& f, const GeodesicPath& path) {
  if (!path.complete()) throw InputError("forward_xray: path does not reach the boundary");
  const auto& ss = path.samples;
  if (ss.size() < 2) throw InputError("forward_xray: path too short");

  // Uniform part: all samples except the bisected exit sample.
  std::size_t m = ss.size() - 1;  // index of the exit sample
  std::vector<double> v(m);
  for (std::size_t i = 0; i < m; ++i) v[i] = f(ss[i].x);

  double integral = integrate_samples(v, path.step);

  // Exit correction: Simpson on [t_{m-1}, t_exit] with the Hermite midpoint.
  double t_a = ss[m - 1].t, t_b = ss[m].t;
  double dt = t_b - t_a;
  if (dt > 0) {
    double vm = f(path_position(path, 0.5 * (t_a + t_b)));
    integral += dt / 6.0 * (v[m - 1] + 4.0 * vm + f(ss[m].x));
  }

  // Step-halving estimate on the uniform part.
  XRayValue out;
  out.integral = integral;
  if (m >= 5) {
    std::vector<double> coarse_samples;
    for (std::size_t i = 0; i < m; i += 2) coarse_samples.push_back(v[i]);
    double coarse = integrate_samples(coarse_samples, 2.0 * path.step);
    double fine = integrate_samples(
        std::vector<double>(v.begin(), v.begin() + (coarse_samples.size() * 2 - 1)), path.step);
    out.error_estimate = std::abs(fine - coarse) / 15.0;
  }
  return out;
}

XRayDataset xray_dataset(const QpGeometry& geom, const ScalarField& f, const XRayFan& fan,
                         int threads) {
  if (geom.dim() != 2) throw InputError("xray_dataset: two-dimensional geometries only");
  const Domain& dom = geom.field().domain();
  if (dom.kind != Domain::Kind::Annulus) throw InputError("xray_dataset: annulus domains only");

  XRayDataset ds;
  ds.rows.resize(static_cast<std::size_t>(fan.boundary_points) * fan.takeoff_angles);
  const double R = dom.outer_radius;

  parallel_for(ds.rows.size(), threads, [&](std::size_t idx) {
    int bi = static_cast<int>(idx) / fan.takeoff_angles;
    int ai = static_cast<int>(idx) % fan.takeoff_angles;
    double beta = 2.0 * M_PI * bi / fan.boundary_points;
    SmallVec z{R * std::cos(beta), R * std::sin(beta)};
    SmallVec nu = normalized(z) * -1.0;  // inward
    double phi = -M_PI / 2 + M_PI * (ai + 0.5) / fan.takeoff_angles;
    SmallVec u{nu[0] * std::cos(phi) - nu[1] * std::sin(phi),
               nu[0] * std::sin(phi) + nu[1] * std::cos(phi)};
    XRayRow row;
    row.boundary_point = z;
    row.angle = phi;
    try {
      double f_unit = geom.finsler(z, u);
      SmallVec y0 = u * (1.0 / f_unit);
      SmallVec x0 = z + y0 * 1e-12;
      GeodesicPath path = integrate_geodesic(geom, x0, y0, fan.h, 4.0 * dom.diameter() * f_unit);
      if (path.complete()) {
        XRayValue val = forward_xray(f, path);
        row.integral = val.integral;
        row.error_estimate = val.error_estimate;
        row.ok = true;
      }
    } catch (const NumericalError&) {
      row.ok = false;
    }
    ds.rows[idx] = row;
  });
  for (const auto& row : ds.rows)
    if (!row.ok) ++ds.flagged;
  return ds;
}

namespace {

// Gram matrix of the basis over the annulus in polar quadrature.
SmallMat gram_matrix(const std::vector<ScalarField>& basis, const Domain& dom) {
  const int k = static_cast<int>(basis.size());
  SmallMat g(k, k);
  const int nr = 96, nt = 96;
  for (int ir = 0; ir < nr; ++ir) {
    double r = dom.inner_radius + (dom.outer_radius - dom.inner_radius) * (ir + 0.5) / nr;
    double wr = r * (dom.outer_radius - dom.inner_radius) / nr;
    for (int it = 0; it < nt; ++it) {
      double th = 2.0 * M_PI * (it + 0.5) / nt;
      SmallVec x{r * std::cos(th), r * std::sin(th)};
      double w = wr * 2.0 * M_PI / nt;
      SmallVec vals(k);
      for (int j = 0; j < k; ++j) vals[j] = basis[j](x);
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) g(a, b) += w * vals[a] * vals[b];
    }
  }
  return g;
}

}  // namespace

InjectivityReport desk_injectivity_experiment(const QpGeometry& geom,
                                              const std::vector<ScalarField>& basis,
                                              const XRayFan& fan, int threads) {
  const int k = static_cast<int>(basis.size());
  const std::size_t fan_size = static_cast<std::size_t>(fan.boundary_points) * fan.takeoff_angles;
  if (k == 0) throw InputError("injectivity experiment: empty basis");
  if (static_cast<std::size_t>(k) > fan_size / 4)
    throw InputError("injectivity experiment: basis larger than a quarter of the fan");

  const Domain& dom = geom.field().domain();
  SmallMat gram = gram_matrix(basis, dom);
  for (int j = 0; j < k; ++j)
    if (gram(j, j) < 1e-14)
      throw InputError("injectivity experiment: basis element " + std::to_string(j) +
                       " vanishes on the domain");

  // Held-out synthetic combination, forward-mapped through the quadrature.
  std::vector<double> w_true(k);
  for (int j = 0; j < k; ++j) w_true[j] = (j % 2 == 0 ? 1.0 : -1.0) / (1.0 + j);
  ScalarField f_true = ScalarField::combination(w_true, basis);

  // One shared ray set: integrate each geodesic once, evaluate every basis
  // element and the held-out field along it.
  struct RowData {
    bool ok = false;
    std::vector<double> a;
    double b = 0;
  };
  std::vector<RowData> rows(fan_size);
  const double R = dom.outer_radius;
  parallel_for(fan_size, threads, [&](std::size_t idx) {
    int bi = static_cast<int>(idx) / fan.takeoff_angles;
    int ai = static_cast<int>(idx) % fan.takeoff_angles;
    double beta = 2.0 * M_PI * bi / fan.boundary_points;
    SmallVec z{R * std::cos(beta), R * std::sin(beta)};
    SmallVec nu = normalized(z) * -1.0;
    double phi = -M_PI / 2 + M_PI * (ai + 0.5) / fan.takeoff_angles;
    SmallVec u{nu[0] * std::cos(phi) - nu[1] * std::sin(phi),
               nu[0] * std::sin(phi) + nu[1] * std::cos(phi)};
    RowData row;
    try {
      double f_unit = geom.finsler(z, u);
      SmallVec y0 = u * (1.0 / f_unit);
      SmallVec x0 = z + y0 * 1e-12;
      GeodesicPath path = integrate_geodesic(geom, x0, y0, fan.h, 4.0 * dom.diameter() * f_unit);
      if (path.complete()) {
        row.a.resize(k);
        for (int j = 0; j < k; ++j) row.a[j] = forward_xray(basis[j], path).integral;
        row.b = forward_xray(f_true, path).integral;
        row.ok = true;
      }
    } catch (const NumericalError&) {
      row.ok = false;
    }
    rows[idx] = row;
  });

  InjectivityReport report;
  SmallMat ata(k, k);
  SmallVec atb(k);
  for (const auto& row : rows) {
    if (!row.ok) continue;
    ++report.rows_used;
    for (int a = 0; a < k; ++a) {
      atb[a] += row.a[a] * row.b;
      for (int b = 0; b < k; ++b) ata(a, b) += row.a[a] * row.a[b];
    }
  }

  SymEigen es = jacobi_eigen(ata);
  double lmin = std::max(es.values[k - 1], 0.0);
  double lmax = std::max(es.values[0], 0.0);
  report.sigma_min = std::sqrt(lmin);
  report.cond = (lmin > 0) ? std::sqrt(lmax / lmin) : std::numeric_limits<double>::infinity();
  report.rank_deficient = !(lmin > 1e-12 * std::max(1.0, lmax));

  SmallVec w_hat(k);
  if (!report.rank_deficient && solve_linear(ata, atb, w_hat)) {
    SmallVec dw(k);
    for (int j = 0; j < k; ++j) dw[j] = w_hat[j] - w_true[j];
    double num = dot(dw, matvec(gram, dw));
    SmallVec wt(k);
    for (int j = 0; j < k; ++j) wt[j] = w_true[j];
    double den = dot(wt, matvec(gram, wt));
    report.recovery_rel_err = std::sqrt(std::max(num, 0.0) / den);
  } else {
    report.rank_deficient = true;
    report.recovery_rel_err = std::numeric_limits<double>::infinity();
  }
  return report;
}

void write_dataset_csv(std::ostream& os, const XRayDataset& dataset) {
  csv_row(os, {"bx", "by", "angle", "integral", "flag"});
  for (const auto& row : dataset.rows) {
    csv_row(os, {fmt_double(row.boundary_point[0]), fmt_double(row.boundary_point[1]),
                 fmt_double(row.angle), fmt_double(row.integral), row.ok ? "0" : "1"});
  }
}

}  // namespace ewg
