#include "ewg/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "ewg/errors.hpp"
#include "ewg/io.hpp"
#include "ewg/sampling.hpp"
#include "ewg/threadpool.hpp"

namespace ewg {

namespace {

struct State {
  SmallVec x, y;
};

State rk4_step(const QpGeometry& geom, const State& s, double h) {
  auto rhs = [&geom](const State& u) -> State {
    SmallVec G = geom.spray(u.x, u.y);
    return {u.y, G * -2.0};
  };
  State k1 = rhs(s);
  State k2 = rhs({s.x + k1.x * (h / 2), s.y + k1.y * (h / 2)});
  State k3 = rhs({s.x + k2.x * (h / 2), s.y + k2.y * (h / 2)});
  State k4 = rhs({s.x + k3.x * h, s.y + k3.y * h});
  State out;
  out.x = s.x + (k1.x + k2.x * 2.0 + k3.x * 2.0 + k4.x) * (h / 6.0);
  out.y = s.y + (k1.y + k2.y * 2.0 + k3.y * 2.0 + k4.y) * (h / 6.0);
  return out;
}

}  // namespace

GeodesicPath integrate_geodesic(const QpGeometry& geom, const SmallVec& x0, const SmallVec& y0,
                                double h, double t_max, std::size_t max_steps) {
  const Domain& dom = geom.field().domain();
  if (h <= 0) throw InputError("integrate_geodesic: step must be positive");
  if (!dom.contains(x0, -1e-14)) throw InputError("integrate_geodesic: x0 must be interior");
  double f0 = geom.finsler(x0, y0);
  if (!(f0 > 0)) throw InputError("integrate_geodesic: F(x0, y0) must be positive");

  GeodesicPath path;
  path.step = h;
  State s{x0, y0};
  double t = 0;
  path.samples.push_back({t, s.x, s.y});

  std::size_t steps = 0;
  while (t < t_max - 1e-15) {
    if (++steps > max_steps) throw NumericalError("integrate_geodesic: step cap exceeded");
    double step = std::min(h, t_max - t);
    State next = rk4_step(geom, s, step);
    if (dom.signed_distance(next.x) > 0.0) {
      // Bisect the substep fraction to the crossing.
      double lo = 0.0, hi = step / h;
      for (int it = 0; it < 100; ++it) {
        if ((hi - lo) * h < 1e-12) break;
        double mid = 0.5 * (lo + hi);
        State trial = rk4_step(geom, s, mid * h);
        if (dom.signed_distance(trial.x) > 0.0)
          hi = mid;
        else
          lo = mid;
      }
      State boundary = rk4_step(geom, s, hi * h);
      double t_exit = t + hi * h;
      path.samples.push_back({t_exit, boundary.x, boundary.y});
      path.exit = BoundaryExit{t_exit, boundary.x};
      break;
    }
    t += step;
    s = next;
    path.samples.push_back({t, s.x, s.y});
    if (step < h) break;  // reached t_max on a short final step
  }

  double drift = 0;
  for (const auto& sample : path.samples) {
    double f = geom.finsler(sample.x, sample.y);
    drift = std::max(drift, std::abs(f - f0));
  }
  path.energy_drift = drift;
  return path;
}

SmallVec path_position(const GeodesicPath& path, double t) {
  const auto& ss = path.samples;
  if (ss.empty()) throw InputError("path_position: empty path");
  if (t <= ss.front().t) return ss.front().x;
  if (t >= ss.back().t) return ss.back().x;
  std::size_t k = 1;
  while (k < ss.size() && ss[k].t < t) ++k;
  const auto& a = ss[k - 1];
  const auto& b = ss[k];
  double dt = b.t - a.t;
  double u = (t - a.t) / dt;
  double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
  double h10 = u * (1 - u) * (1 - u);
  double h01 = u * u * (3 - 2 * u);
  double h11 = u * u * (u - 1);
  return a.x * h00 + a.y * (h10 * dt) + b.x * h01 + b.y * (h11 * dt);
}

namespace {

// Closest approach of the path to a target: discrete scan plus golden
// refinement on the Hermite interpolant of the bracketing intervals.
std::pair<double, SmallVec> closest_approach(const GeodesicPath& path, const SmallVec& target) {
  const auto& ss = path.samples;
  std::size_t best = 0;
  double best_d = 1e300;
  for (std::size_t i = 0; i < ss.size(); ++i) {
    double d = distance(ss[i].x, target);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  double t_lo = ss[best > 0 ? best - 1 : 0].t;
  double t_hi = ss[std::min(best + 1, ss.size() - 1)].t;
  if (t_hi <= t_lo) return {ss[best].t, ss[best].x};
  double t_star = golden_section_min(
      [&](double t) { return distance(path_position(path, t), target); }, t_lo, t_hi,
      1e-13 * std::max(1.0, t_hi));
  return {t_star, path_position(path, t_star)};
}

SmallVec direction_from_angles(int n, const double* ang) {
  if (n == 2) return SmallVec{std::cos(ang[0]), std::sin(ang[0])};
  return SmallVec{std::cos(ang[0]) * std::cos(ang[1]), std::cos(ang[0]) * std::sin(ang[1]),
                  std::sin(ang[0])};
}

}  // namespace

ShootResult shoot_between(const QpGeometry& geom, const SmallVec& x_a, const SmallVec& x_b,
                          ShootConfig cfg) {
  const int n = geom.dim();
  const Domain& dom = geom.field().domain();
  ShootResult out;
  if (distance(x_a, x_b) < 1e-13) {
    out.degenerate = true;
    out.converged = true;
    out.time = 0;
    return out;
  }
  const double diam = dom.diameter();
  const double miss_tol = cfg.miss_rel_tol * diam;

  // Travel-time estimate along the chord fixes the integration horizon.
  double t_est = geom.finsler(x_a, x_b - x_a);
  double t_max = std::max(6.0 * t_est, 20.0 * cfg.h);

  auto launch = [&](const double* ang) -> std::pair<double, GeodesicPath> {
    SmallVec u = direction_from_angles(n, ang);
    SmallVec y0 = u * (1.0 / geom.finsler(x_a, u));
    GeodesicPath path = integrate_geodesic(geom, x_a, y0, cfg.h, t_max);
    auto [t_star, x_star] = closest_approach(path, x_b);
    (void)t_star;
    return {distance(x_star, x_b), std::move(path)};
  };

  SmallVec chord = normalized(x_b - x_a);
  double base[2] = {0, 0};
  if (n == 2) {
    base[0] = std::atan2(chord[1], chord[0]);
  } else {
    base[0] = std::asin(std::clamp(chord[2], -1.0, 1.0));
    base[1] = std::atan2(chord[1], chord[0]);
  }

  const int n_ang = n - 1;
  double best_miss = 1e300;
  for (int restart = 0; restart <= cfg.restarts; ++restart) {
    double ang[2] = {base[0], base[1]};
    if (restart > 0) {
      double off = (2.0 * M_PI * restart) / (cfg.restarts + 1);
      ang[0] += 0.35 * std::sin(off);
      if (n_ang > 1) ang[1] += 0.35 * std::cos(off);
    }
    auto [miss, path] = launch(ang);
    for (int it = 0; it < cfg.max_newton && miss > miss_tol; ++it) {
      double fd = 1e-7;
      double grad[2] = {0, 0};
      for (int a = 0; a < n_ang; ++a) {
        double ap[2] = {ang[0], ang[1]};
        ap[a] += fd;
        auto [mp, pp] = launch(ap);
        grad[a] = (mp - miss) / fd;
      }
      double g2 = grad[0] * grad[0] + grad[1] * grad[1];
      if (g2 < 1e-30) break;
      double step[2] = {-miss * grad[0] / g2, -miss * grad[1] / g2};
      double damp = 1.0;
      bool improved = false;
      for (; damp > 1.0 / 256.0; damp *= 0.5) {
        double at[2] = {ang[0] + damp * step[0], ang[1] + damp * step[1]};
        auto [mt, pt] = launch(at);
        if (mt < miss) {
          ang[0] = at[0];
          ang[1] = at[1];
          miss = mt;
          path = std::move(pt);
          improved = true;
          break;
        }
      }
      if (!improved) break;
    }
    if (miss < best_miss) {
      best_miss = miss;
      auto [t_star, x_star] = closest_approach(path, x_b);
      (void)x_star;
      out.path = std::move(path);
      out.time = t_star;
      out.miss = miss;
    }
    if (best_miss <= miss_tol) break;
  }
  out.converged = best_miss <= miss_tol;
  return out;
}

SmallVec boundary_normal_exp(const QpGeometry& geom, const SmallVec& z, double s, double h) {
  const Domain& dom = geom.field().domain();
  if (s < 0) throw InputError("boundary_normal_exp: s must be nonnegative");
  if (std::abs(dom.signed_distance(z)) > 1e-9)
    throw InputError("boundary_normal_exp: z must lie on the boundary");
  if (s == 0) return z;

  SmallVec inward(geom.dim());
  if (dom.kind == Domain::Kind::Annulus) {
    double r = norm(z);
    bool outer = std::abs(r - dom.outer_radius) < std::abs(r - dom.inner_radius);
    inward = normalized(z) * (outer ? -1.0 : 1.0);
  } else {
    int face = 0;
    double gap = 1e300;
    double sign = 1.0;
    for (int i = 0; i < geom.dim(); ++i) {
      if (z[i] - dom.lo[i] < gap) {
        gap = z[i] - dom.lo[i];
        face = i;
        sign = 1.0;
      }
      if (dom.hi[i] - z[i] < gap) {
        gap = dom.hi[i] - z[i];
        face = i;
        sign = -1.0;
      }
    }
    inward[face] = sign;
  }

  // Inward conormal mapped through the Legendre transform, scaled to F-unit.
  SmallVec y_raw = geom.legendre_forward(z, inward);
  SmallVec y0 = y_raw * (1.0 / geom.finsler(z, y_raw));
  // Nudge inside so the start point passes the interior check.
  SmallVec x0 = z + y0 * 1e-12;
  GeodesicPath path = integrate_geodesic(geom, x0, y0, std::min(h, s / 8.0), s);
  return path.samples.back().x;
}

HerglotzReport herglotz_check(const QpGeometry& geom, int r_samples, int angle_samples) {
  const StiffnessField& field = geom.field();
  if (!field.is_isotropic() && field.kind() != StiffnessField::Kind::IsotropicRadial)
    throw InputError("herglotz_check: field must be radially symmetric");
  const Domain& dom = field.domain();
  if (dom.kind != Domain::Kind::Annulus)
    throw InputError("herglotz_check: domain must be an annulus");
  const int n = geom.dim();

  auto speed = [&](double r, const SmallVec& u) {
    SmallVec x(n);
    x[0] = r;
    return 1.0 / geom.finsler(x, u);
  };

  auto dirs = unit_directions(n, angle_samples);
  HerglotzReport report;
  report.min_margin = 1e300;
  const double r0 = dom.inner_radius, r1 = dom.outer_radius;
  const double dr = 1e-5 * (r1 - r0);
  for (int i = 0; i < r_samples; ++i) {
    double r = r0 + (r1 - r0) * (i + 0.5) / r_samples;
    HerglotzRow row{r, 1e300, 1e300};
    for (const auto& u : dirs) {
      double v = speed(r, u);
      double vp = (speed(r + dr, u) - speed(r - dr, u)) / (2 * dr);
      // d/dr (r / v) = (v - r v') / v^2
      double margin = (v - r * vp) / (v * v);
      row.speed_min = std::min(row.speed_min, v);
      row.margin = std::min(row.margin, margin);
    }
    report.min_margin = std::min(report.min_margin, row.margin);
    report.rows.push_back(row);
  }
  report.pass = report.min_margin > 0;
  return report;
}

namespace {

struct PolarState {
  double r, rdot, rddot, thdot;
};

PolarState polar_state(const QpGeometry& geom, const SmallVec& x, const SmallVec& y) {
  double r = norm(x);
  SmallVec acc = geom.spray(x, y) * -2.0;
  double rdot = dot(x, y) / r;
  double rddot = (dot(y, y) + dot(x, acc)) / r - rdot * rdot / r;
  double thdot = (x[0] * y[1] - x[1] * y[0]) / (r * r);
  return {r, rdot, rddot, thdot};
}

}  // namespace

ExpansionFit lowest_point_expansion_check(const QpGeometry& geom, double r0, ExpansionConfig cfg) {
  const Domain& dom = geom.field().domain();
  if (dom.kind != Domain::Kind::Annulus)
    throw InputError("expansion check: domain must be an annulus");
  if (!(r0 > dom.inner_radius && r0 < dom.outer_radius))
    throw InputError("expansion check: r0 must be inside the open annulus");
  if (geom.dim() != 2) throw InputError("expansion check: two-dimensional geometries only");

  SmallVec x0{r0, 0.0};
  SmallVec e_th{0.0, 1.0};
  SmallVec y0 = e_th * (1.0 / geom.finsler(x0, e_th));  // unit speed, rdot(0) = 0

  ExpansionFit fit;
  fit.r0 = r0;
  fit.a = polar_state(geom, x0, y0).rddot;

  const double t_hi = cfg.t_lo * std::pow(2.0, cfg.levels - 1);
  GeodesicPath fwd = integrate_geodesic(geom, x0, y0, cfg.h, t_hi * 1.05);
  if (fwd.exit && fwd.exit->t < t_hi)
    throw NumericalError("expansion check: geodesic exits before the fit window");

  // h divides the dyadic times, so states land on stored samples.
  auto state_at = [&](const GeodesicPath& path, double t) -> PolarState {
    std::size_t idx =
        std::min<std::size_t>(path.samples.size() - 1, static_cast<std::size_t>(t / cfg.h + 0.5));
    const auto& s = path.samples[idx];
    return polar_state(geom, s.x, s.y);
  };

  std::vector<double> log_t, log_e1, log_e2, log_e3;
  for (int k = 0; k < cfg.levels; ++k) {
    double t = cfg.t_lo * std::pow(2.0, k);
    PolarState ps = state_at(fwd, t);
    double e1 = ps.rddot - fit.a;
    double e2 = ps.rdot - fit.a * t;
    double e3 = (ps.r - r0) - 0.5 * fit.a * t * t;
    log_t.push_back(std::log(t));
    log_e1.push_back(std::log(std::abs(e1) + 1e-300));
    log_e2.push_back(std::log(std::abs(e2) + 1e-300));
    log_e3.push_back(std::log(std::abs(e3) + 1e-300));
  }
  fit.slope_e1 = fit_line(log_t, log_e1).first;
  fit.slope_e2 = fit_line(log_t, log_e2).first;
  fit.slope_e3 = fit_line(log_t, log_e3).first;

  // Weak reversibility by symmetric differences across t = 0.
  double delta = cfg.rev_delta;
  double h_small = delta / 8.0;
  GeodesicPath plus = integrate_geodesic(geom, x0, y0, h_small, delta);
  GeodesicPath minus = integrate_geodesic(geom, x0, y0 * -1.0, h_small, delta);
  PolarState sp = polar_state(geom, plus.samples.back().x, plus.samples.back().y);
  PolarState sm = polar_state(geom, minus.samples.back().x, minus.samples.back().y);
  fit.residual_r3 = (sp.rddot - sm.rddot) / (2 * delta);
  // theta runs backward on the reversed ray; thdot flips sign there.
  fit.residual_th2 = (sp.thdot - (-sm.thdot)) / (2 * delta);
  return fit;
}

TravelTimeTable travel_time_data(const QpGeometry& geom, const std::vector<SmallVec>& sources,
                                 const std::vector<SmallVec>& receivers, ShootConfig cfg,
                                 int threads) {
  TravelTimeTable table;
  table.rows.resize(sources.size() * receivers.size());
  parallel_for(table.rows.size(), threads, [&](std::size_t idx) {
    std::size_t si = idx / receivers.size();
    std::size_t ri = idx % receivers.size();
    ShootResult r = shoot_between(geom, sources[si], receivers[ri], cfg);
    table.rows[idx] = {sources[si], receivers[ri], r.time, r.converged};
  });
  return table;
}

void write_path_csv(std::ostream& os, const GeodesicPath& path) {
  if (path.samples.empty()) return;
  const int n = path.samples.front().x.size();
  std::vector<std::string> head{"t"};
  for (int i = 0; i < n; ++i) head.push_back("x" + std::to_string(i + 1));
  for (int i = 0; i < n; ++i) head.push_back("y" + std::to_string(i + 1));
  csv_row(os, head);
  for (const auto& s : path.samples) {
    std::vector<std::string> cells{fmt_double(s.t)};
    for (int i = 0; i < n; ++i) cells.push_back(fmt_double(s.x[i]));
    for (int i = 0; i < n; ++i) cells.push_back(fmt_double(s.y[i]));
    csv_row(os, cells);
  }
}

void write_table_csv(std::ostream& os, const TravelTimeTable& table, int dim) {
  std::vector<std::string> head;
  for (int i = 0; i < dim; ++i) head.push_back("sx" + std::to_string(i + 1));
  for (int i = 0; i < dim; ++i) head.push_back("rx" + std::to_string(i + 1));
  head.push_back("time");
  head.push_back("converged");
  csv_row(os, head);
  for (const auto& row : table.rows) {
    std::vector<std::string> cells;
    for (int i = 0; i < dim; ++i) cells.push_back(fmt_double(row.source[i]));
    for (int i = 0; i < dim; ++i) cells.push_back(fmt_double(row.receiver[i]));
    cells.push_back(fmt_double(row.time));
    cells.push_back(row.converged ? "1" : "0");
    csv_row(os, cells);
  }
}

}  // namespace ewg
