#ifndef EWG_GEODESICS_HPP
#define EWG_GEODESICS_HPP

#include <iosfwd>
#include <optional>
#include <vector>

#include "ewg/finsler.hpp"

namespace ewg {

struct GeodesicSample {
  double t;
  SmallVec x;
  SmallVec y;
};

struct BoundaryExit {
  double t;
  SmallVec x;
};

struct GeodesicPath {
  std::vector<GeodesicSample> samples;  // uniform step, last interval may be short
  double step = 0;
  std::optional<BoundaryExit> exit;
  double energy_drift = 0;  // max |F(x,y) - F(x0,y0)| along the path
  bool complete() const { return exit.has_value(); }
};

/// Classical RK4 on (dx = y, dy = -2 G(x, y)); stops at the first boundary
/// crossing, located by bisection of the final substep. Throws on spray
/// failure or when the step count cap is exceeded before t_max.
GeodesicPath integrate_geodesic(const QpGeometry& geom, const SmallVec& x0, const SmallVec& y0,
                                double h, double t_max, std::size_t max_steps = 2'000'000);

/// Position at time t by cubic Hermite interpolation of the stored samples.
SmallVec path_position(const GeodesicPath& path, double t);

struct ShootResult {
  GeodesicPath path;
  double time = 0;
  double miss = 0;  // endpoint distance, absolute
  bool converged = false;
  bool degenerate = false;  // coincident endpoints
};

struct ShootConfig {
  double h = 2e-3;
  double miss_rel_tol = 1e-7;  // fraction of the domain diameter
  int max_newton = 40;
  int restarts = 8;
};

/// Damped-Newton shooting on the takeoff direction of a unit-speed geodesic
/// from x_a, minimizing the endpoint miss at x_b.
ShootResult shoot_between(const QpGeometry& geom, const SmallVec& x_a, const SmallVec& x_b,
                          ShootConfig cfg = {});

/// Boundary-normal exponential map: the unit-speed geodesic from boundary
/// point z with initial vector given by the Legendre image of the inward unit
/// conormal, evaluated at arc parameter s.
SmallVec boundary_normal_exp(const QpGeometry& geom, const SmallVec& z, double s,
                             double h = 1e-3);

struct HerglotzRow {
  double r;
  double speed_min;  // min over fiber directions of the qP speed at radius r
  double margin;     // min over directions of d/dr (r / v(r, phi))
};

struct HerglotzReport {
  bool pass = false;
  double min_margin = 0;
  std::vector<HerglotzRow> rows;
};

/// Radial non-trapping check d/dr (r / v(r, phi)) > 0 on a radius grid, with
/// the qP speed sampled over fiber directions. Requires a radially symmetric
/// field.
HerglotzReport herglotz_check(const QpGeometry& geom, int r_samples = 32, int angle_samples = 8);

struct ExpansionFit {
  double r0 = 0;
  double a = 0;             // polar radial acceleration at the lowest point
  double slope_e1 = 0;      // expected near 2
  double slope_e2 = 0;      // expected near 3
  double slope_e3 = 0;      // expected near 4
  double residual_r3 = 0;   // third radial derivative at t = 0
  double residual_th2 = 0;  // angular acceleration at t = 0
};

struct ExpansionConfig {
  double h = 1e-4;        // integrator step
  double t_lo = 0.0125;   // first dyadic fit time
  int levels = 5;         // dyadic points t_lo * 2^k, k = 0..levels-1
  double rev_delta = 1e-4;  // step for the reversibility residuals
};

/// Integrates the geodesic with dr/dt(0) = 0 from radius r0, fits the
/// lowest-point Taylor remainders and measures the weak-reversibility
/// residuals by symmetric differences.
ExpansionFit lowest_point_expansion_check(const QpGeometry& geom, double r0,
                                          ExpansionConfig cfg = {});

struct TravelTimeRow {
  SmallVec source;
  SmallVec receiver;
  double time = 0;
  bool converged = false;
};

struct TravelTimeTable {
  std::vector<TravelTimeRow> rows;
};

TravelTimeTable travel_time_data(const QpGeometry& geom, const std::vector<SmallVec>& sources,
                                 const std::vector<SmallVec>& receivers, ShootConfig cfg = {},
                                 int threads = 1);

/// CSV: t,x1..xn,y1..yn
void write_path_csv(std::ostream& os, const GeodesicPath& path);
/// CSV: sx..,rx..,time,converged
void write_table_csv(std::ostream& os, const TravelTimeTable& table, int dim);

}  // namespace ewg

#endif
