#include "ewg/christoffel.hpp"

#include <cmath>
#include <ostream>

#include "ewg/errors.hpp"
#include "ewg/field.hpp"
#include "ewg/io.hpp"
#include "ewg/sampling.hpp"

namespace ewg {

std::string momentum_var(int i) { return "p" + std::to_string(i + 1); }

SmallMat christoffel_matrix(const StiffnessD& c, const SmallVec& p) {
  const int n = c.dim();
  if (p.size() != n) throw InputError("christoffel_matrix: dimension mismatch");
  SmallMat g(n, n);
  for (int i = 0; i < n; ++i)
    for (int l = i; l < n; ++l) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) {
        double pj = p[j];
        if (pj == 0.0) continue;
        for (int k = 0; k < n; ++k) s += c.at(i, j, k, l) * pj * p[k];
      }
      g(i, l) = s;
      g(l, i) = s;
    }
  return g;
}

std::vector<std::vector<MultiPoly>> christoffel_symbolic(const StiffnessQ& c) {
  const int n = c.dim();
  std::vector<MultiPoly> p;
  for (int i = 0; i < n; ++i) p.push_back(MultiPoly::variable(momentum_var(i)));
  std::vector<std::vector<MultiPoly>> g(n, std::vector<MultiPoly>(n));
  for (int i = 0; i < n; ++i)
    for (int l = i; l < n; ++l) {
      MultiPoly s;
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          const Rat& cij = c.at(i, j, k, l);
          if (cij == 0) continue;
          s += cij * (p[j] * p[k]);
        }
      g[i][l] = s;
      if (l != i) g[l][i] = s;
    }
  return g;
}

namespace {

MultiPoly det3(const std::vector<std::vector<MultiPoly>>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

}  // namespace

MultiPoly slowness_polynomial(const StiffnessQ& c) {
  const int n = c.dim();
  if (n != 2 && n != 3)
    throw InputError("slowness_polynomial: exact path supports dimensions 2 and 3");
  auto g = christoffel_symbolic(c);
  const MultiPoly one = MultiPoly::constant(1);
  for (int i = 0; i < n; ++i) g[i][i] -= one;
  if (n == 2) return g[0][0] * g[1][1] - g[0][1] * g[1][0];
  return det3(g);
}

double slowness_eval(const StiffnessD& c, const SmallVec& p) {
  const int n = c.dim();
  SmallMat g = christoffel_matrix(c, p);
  for (int i = 0; i < n; ++i) g(i, i) -= 1.0;
  // LU determinant.
  double det = 1.0;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(g(i, k)) > std::abs(g(piv, k))) piv = i;
    if (g(piv, k) == 0.0) return 0.0;
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(g(k, j), g(piv, j));
      det = -det;
    }
    det *= g(k, k);
    for (int i = k + 1; i < n; ++i) {
      double f = g(i, k) / g(k, k);
      for (int j = k; j < n; ++j) g(i, j) -= f * g(k, j);
    }
  }
  return det;
}

EigenSystem eigen_sorted(const StiffnessD& c, const SmallVec& p) {
  if (norm(p) == 0.0) throw InputError("eigen_sorted: p must be nonzero");
  SymEigen es = jacobi_eigen(christoffel_matrix(c, p));
  return {es.values, es.vectors, es.residual};
}

namespace {

double relative_gap(const SmallVec& values) {
  double l1 = values[0], l2 = values[1];
  if (l1 <= 0.0) return -1.0;
  return (l1 - l2) / l1;
}

}  // namespace

GapReport qp_gap_margin(const StiffnessD& c, SphereSampling sampling) {
  const int n = c.dim();
  int count = sampling.count > 0 ? sampling.count : (n == 2 ? 1024 : 2048);
  if (count < 2 * n) count = 2 * n;
  auto dirs = unit_directions(n, count);

  GapReport report;
  report.samples = count;
  report.valid = true;
  report.min_gap = 2.0;
  double max_slope = 0.0;
  double prev_gap = -1.0;
  SmallVec prev_dir;
  for (const auto& u : dirs) {
    EigenSystem es = eigen_sorted(c, u);
    double gap = relative_gap(es.values);
    if (es.values[0] <= 0.0) {
      report.valid = false;
      report.note = "lambda1 <= 0 at a sampled direction (tensor not positive definite)";
      report.min_gap = 0.0;
      report.argmin_direction = u;
      return report;
    }
    if (gap < report.min_gap) {
      report.min_gap = gap;
      report.argmin_direction = u;
    }
    if (prev_gap >= 0.0) {
      double dd = distance(u, prev_dir);
      if (dd > 1e-12) max_slope = std::max(max_slope, std::abs(gap - prev_gap) / dd);
    }
    prev_gap = gap;
    prev_dir = u;
  }
  // Mesh width estimate for the sampled set; the margin discounts one mesh
  // step of observed slope.
  double mesh = (n == 2) ? (2.0 * M_PI / count) : (4.0 / std::sqrt(static_cast<double>(count)));
  report.lipschitz_margin = report.min_gap - max_slope * mesh;
  return report;
}

GapReport qp_gap_margin(const StiffnessField& field, SphereSampling sampling, int point_samples) {
  const int n = field.dim();
  GapReport worst;
  worst.valid = true;
  worst.min_gap = 2.0;
  // Radial line of base points covers the radially symmetric cases; boxes use
  // the diagonal.
  for (int s = 0; s < point_samples; ++s) {
    double t = (s + 0.5) / point_samples;
    SmallVec x(n);
    if (field.domain().kind == Domain::Kind::Annulus) {
      double r = field.domain().inner_radius +
                 t * (field.domain().outer_radius - field.domain().inner_radius);
      x[0] = r;
    } else {
      for (int i = 0; i < n; ++i)
        x[i] = field.domain().lo[i] + t * (field.domain().hi[i] - field.domain().lo[i]);
    }
    GapReport r = qp_gap_margin(field.evaluate(x), sampling);
    r.samples *= point_samples;
    if (!r.valid) return r;
    if (r.min_gap < worst.min_gap) {
      worst = r;
      worst.samples = sampling.count * point_samples;
    }
  }
  return worst;
}

std::vector<SmallVec> degeneracy_scan(const StiffnessD& c, SphereSampling sampling, double tol) {
  if (tol <= 0.0) throw InputError("degeneracy_scan: tol must be positive");
  const int n = c.dim();
  int count = sampling.count > 0 ? sampling.count : (n == 2 ? 1024 : 2048);
  auto dirs = unit_directions(n, count);

  auto min_adjacent_gap = [&](const SmallVec& u) {
    EigenSystem es = eigen_sorted(c, u);
    double scale = std::max(std::abs(es.values[0]), 1e-300);
    double g = 1e300;
    for (int i = 0; i + 1 < n; ++i) g = std::min(g, (es.values[i] - es.values[i + 1]) / scale);
    return g;
  };

  std::vector<SmallVec> hits;
  for (const auto& u : dirs) {
    if (min_adjacent_gap(u) >= tol) continue;
    SmallVec refined = u;
    if (n == 2) {
      double theta = std::atan2(u[1], u[0]);
      double span = 2.0 * M_PI / count;
      double best = golden_section_min(
          [&](double th) { return min_adjacent_gap(SmallVec{std::cos(th), std::sin(th)}); },
          theta - span, theta + span, 1e-12);
      refined = SmallVec{std::cos(best), std::sin(best)};
    } else {
      // Coordinate-wise golden section in spherical angles around the sample.
      double theta = std::acos(std::clamp(u[2], -1.0, 1.0));
      double phi = std::atan2(u[1], u[0]);
      double span = 4.0 / std::sqrt(static_cast<double>(count));
      auto dir = [&](double th, double ph) {
        return SmallVec{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
      };
      for (int pass = 0; pass < 3; ++pass) {
        theta = golden_section_min([&](double th) { return min_adjacent_gap(dir(th, phi)); },
                                   theta - span, theta + span, 1e-10);
        phi = golden_section_min([&](double ph) { return min_adjacent_gap(dir(theta, ph)); },
                                 phi - span, phi + span, 1e-10);
        span *= 0.25;
      }
      refined = dir(theta, phi);
    }
    hits.push_back(normalized(refined));
  }
  return hits;
}

void write_gap_csv(std::ostream& os, const StiffnessD& c, int samples) {
  const int n = c.dim();
  auto dirs = unit_directions(n, samples);
  if (n == 2) {
    csv_row(os, {"theta", "lambda1", "lambda2", "rel_gap"});
  } else {
    csv_row(os, {"theta", "phi", "lambda1", "lambda2", "lambda3", "rel_gap"});
  }
  for (const auto& u : dirs) {
    EigenSystem es = eigen_sorted(c, u);
    double gap = relative_gap(es.values);
    std::vector<std::string> cells;
    if (n == 2) {
      cells.push_back(fmt_double(std::atan2(u[1], u[0])));
    } else {
      cells.push_back(fmt_double(std::acos(std::clamp(u[2], -1.0, 1.0))));
      cells.push_back(fmt_double(std::atan2(u[1], u[0])));
    }
    for (int i = 0; i < n; ++i) cells.push_back(fmt_double(es.values[i]));
    cells.push_back(fmt_double(gap));
    csv_row(os, cells);
  }
}

}  // namespace ewg
