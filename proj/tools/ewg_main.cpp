// Command line front end: classification, slowness sweeps, singularity
// reports, Finsler invariant checks, geodesic and travel-time runs, the
// geodesic X-ray transform and the lowest-point expansion fits.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "ewg/christoffel.hpp"
#include "ewg/classifier2d.hpp"
#include "ewg/errors.hpp"
#include "ewg/field.hpp"
#include "ewg/finsler.hpp"
#include "ewg/geodesics.hpp"
#include "ewg/io.hpp"
#include "ewg/polyalg.hpp"
#include "ewg/sampling.hpp"
#include "ewg/singularity.hpp"
#include "ewg/stiffness.hpp"
#include "ewg/threadpool.hpp"
#include "ewg/xray.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitInvalidInput = 2;
constexpr int kExitSingularVerdict = 3;

struct CommonOpts {
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int threads = ewg::default_thread_count();
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--out-dir", opts.out_dir, "Directory for CSV/JSON outputs");
  cmd->add_option("--seed", opts.seed, "Random seed for sampled checks");
  cmd->add_option("--threads", opts.threads, "Worker threads for sweeps");
}

std::ofstream open_out(const CommonOpts& opts, const std::string& name) {
  std::filesystem::create_directories(opts.out_dir);
  std::filesystem::path p = std::filesystem::path(opts.out_dir) / name;
  std::ofstream os(p);
  if (!os) throw ewg::InputError("cannot open output file: " + p.string());
  return os;
}

void write_json(const CommonOpts& opts, const std::string& name, const json& j) {
  auto os = open_out(opts, name);
  os << j.dump(2) << "\n";
}

json vec_json(const ewg::SmallVec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

// ---- classify2d -------------------------------------------------------------

struct Classify2dOpts {
  CommonOpts common;
  std::string tensor_path;
};

int run_classify2d(const Classify2dOpts& opts) {
  ewg::TensorFile tf = ewg::read_tensor_file(opts.tensor_path);
  if (tf.dim != 2) throw ewg::InputError("classify2d: tensor must be two-dimensional");
  if (!tf.rational)
    throw ewg::InputError("classify2d: exact classification needs scalar_kind = \"rational\"");

  ewg::ClassifierReport report = ewg::classifier_invariants(tf.exact);
  json j;
  j["D1"] = ewg::rat_to_string(report.D1);
  j["D2"] = ewg::rat_to_string(report.D2);
  j["D"] = ewg::rat_to_string(report.D);
  j["L"] = ewg::rat_to_string(report.L);
  j["R"] = ewg::rat_to_string(report.R);
  j["multiple_eigenvalue"] = report.multiple_eigenvalue;
  if (report.witness)
    j["witness"] = vec_json(*report.witness);
  else
    j["witness"] = nullptr;
  write_json(opts.common, "classify2d.json", j);
  std::cout << j.dump(2) << "\n";
  return report.multiple_eigenvalue ? kExitSingularVerdict : kExitOk;
}

// ---- slowness ---------------------------------------------------------------

struct SlownessOpts {
  CommonOpts common;
  std::string tensor_path;
  int samples = 512;
  bool all_branches = false;
};

int run_slowness(const SlownessOpts& opts) {
  ewg::TensorFile tf = ewg::read_tensor_file(opts.tensor_path);
  const int n = tf.dim;
  auto dirs = ewg::unit_directions(n, opts.samples);
  auto os = open_out(opts.common, "slowness.csv");

  std::vector<std::string> head;
  if (n == 2)
    head = {"theta", "s_qp", "s_qs"};
  else
    head = {"theta", "phi", "s_qp", "s_qs"};
  if (opts.all_branches && n == 3) head.push_back("s_qs2");
  ewg::csv_row(os, head);

  for (const auto& u : dirs) {
    ewg::EigenSystem es = ewg::eigen_sorted(tf.numeric, u);
    std::vector<std::string> cells;
    if (n == 2) {
      cells.push_back(ewg::fmt_double(std::atan2(u[1], u[0])));
    } else {
      cells.push_back(ewg::fmt_double(std::acos(std::clamp(u[2], -1.0, 1.0))));
      cells.push_back(ewg::fmt_double(std::atan2(u[1], u[0])));
    }
    for (int b = 0; b < (opts.all_branches && n == 3 ? 3 : 2); ++b) {
      double lam = es.values[b];
      cells.push_back(ewg::fmt_double(lam > 0 ? 1.0 / std::sqrt(lam) : -1.0));
    }
    ewg::csv_row(os, cells);
  }
  return kExitOk;
}

// ---- gap --------------------------------------------------------------------

struct GapOpts {
  CommonOpts common;
  std::string tensor_path;
  std::string field_path;
  int samples = 0;
};

int run_gap(const GapOpts& opts) {
  ewg::GapReport report;
  if (!opts.tensor_path.empty()) {
    ewg::TensorFile tf = ewg::read_tensor_file(opts.tensor_path);
    report = ewg::qp_gap_margin(tf.numeric, {opts.samples});
    auto os = open_out(opts.common, "gap.csv");
    ewg::write_gap_csv(os, tf.numeric, opts.samples > 0 ? opts.samples : (tf.dim == 2 ? 1024 : 2048));
  } else if (!opts.field_path.empty()) {
    ewg::StiffnessField field = ewg::read_field_file(opts.field_path);
    report = ewg::qp_gap_margin(field, {opts.samples});
  } else {
    throw ewg::InputError("gap: provide --tensor or --field");
  }
  json j;
  j["min_gap"] = report.min_gap;
  j["argmin_direction"] = vec_json(report.argmin_direction);
  j["samples"] = report.samples;
  j["valid"] = report.valid;
  j["lipschitz_margin"] = report.lipschitz_margin;
  if (!report.note.empty()) j["note"] = report.note;
  write_json(opts.common, "gap.json", j);
  std::cout << j.dump(2) << "\n";
  return report.valid ? kExitOk : kExitNumerical;
}

// ---- singularity ------------------------------------------------------------

struct SingularityOpts {
  CommonOpts common;
  std::string tensor_path;
  std::string search = "exact";
  int directions = 128;
  double tol_residual = 1e-9;
};

int run_singularity(const SingularityOpts& opts) {
  ewg::TensorFile tf = ewg::read_tensor_file(opts.tensor_path);
  if (!tf.rational)
    throw ewg::InputError("singularity: exact slowness polynomial needs rational scalars");
  ewg::MultiPoly P = ewg::slowness_polynomial(tf.exact);

  ewg::SingularSearch search;
  if (opts.search == "exact") {
    if (tf.dim != 2)
      throw ewg::InputError("singularity: --search exact supports dimension 2; use sampled");
    search = ewg::SingularSearch::Exact2D;
  } else if (opts.search == "sampled") {
    search = ewg::SingularSearch::SampledShell;
  } else {
    throw ewg::InputError("singularity: --search must be exact or sampled");
  }

  ewg::SingularSearchConfig cfg;
  cfg.directions = opts.directions;
  cfg.residual_tol = opts.tol_residual;
  ewg::SmoothnessReport report = ewg::variety_smoothness(P, search, cfg);

  json j;
  j["scheme_smooth"] = report.scheme_smooth;
  j["variety_smooth"] = report.variety_smooth;
  j["squarefree"] = report.squarefree;
  j["slowness_polynomial"] = P.to_string();
  j["scheme_singular_count"] = report.scheme_singular_points.size();
  j["variety_singular_count"] = report.variety_singular_points.size();
  write_json(opts.common, "singularity.json", j);

  auto os = open_out(opts.common, "singular_points.csv");
  std::vector<std::string> head;
  for (int i = 0; i < tf.dim; ++i) head.push_back("p" + std::to_string(i + 1));
  head.push_back("abs_value");
  head.push_back("grad_norm");
  ewg::csv_row(os, head);
  for (const auto& pt : report.scheme_singular_points) {
    std::vector<std::string> cells;
    for (int i = 0; i < tf.dim; ++i) cells.push_back(ewg::fmt_double(pt.p[i]));
    cells.push_back(ewg::fmt_double(pt.value));
    cells.push_back(ewg::fmt_double(pt.grad_norm));
    ewg::csv_row(os, cells);
  }
  std::cout << j.dump(2) << "\n";
  return report.scheme_smooth ? kExitOk : kExitSingularVerdict;
}

// ---- finsler-check ----------------------------------------------------------

struct FinslerCheckOpts {
  CommonOpts common;
  std::string field_path;
  int samples = 200;
  double tol_roundtrip = 1e-8;
  double tol_grad = 1e-6;
};

int run_finsler_check(const FinslerCheckOpts& opts) {
  ewg::StiffnessField field = ewg::read_field_file(opts.field_path);
  ewg::QpGeometry geom(field);
  if (field.regularity() < 2)
    std::cerr << "warning: field regularity " << field.regularity()
              << " is below the level needed for spray derivatives (k >= 2)\n";
  ewg::BatteryResult battery = ewg::finsler_battery(geom, opts.samples, opts.common.seed);
  bool pass = battery.pass(opts.tol_roundtrip, opts.tol_grad);

  json j;
  j["samples"] = battery.samples;
  j["homogeneity_f"] = battery.homogeneity_f;
  j["euler_hamiltonian"] = battery.euler_hamiltonian;
  j["legendre_roundtrip"] = battery.legendre_roundtrip;
  j["grad_analytic_vs_fd"] = battery.grad_analytic_vs_fd;
  j["g_euler"] = battery.g_euler;
  j["g_dual_vs_fd"] = battery.g_dual_vs_fd;
  j["g_pd_failures"] = battery.g_pd_failures;
  j["isotropic_closed_form"] = battery.isotropic_closed_form;
  j["pass"] = pass;
  write_json(opts.common, "finsler_check.json", j);
  std::cout << j.dump(2) << "\n";
  return pass ? kExitOk : kExitNumerical;
}

// ---- geodesic ---------------------------------------------------------------

struct GeodesicOpts {
  CommonOpts common;
  std::string field_path;
  std::string x0, y0;
  double h = 1e-3;
  double t_max = 2.0;
};

int run_geodesic(const GeodesicOpts& opts) {
  ewg::StiffnessField field = ewg::read_field_file(opts.field_path);
  ewg::QpGeometry geom(field);
  ewg::SmallVec x0 = ewg::parse_vec(opts.x0);
  ewg::SmallVec y0 = ewg::parse_vec(opts.y0);
  ewg::GeodesicPath path = ewg::integrate_geodesic(geom, x0, y0, opts.h, opts.t_max);
  auto os = open_out(opts.common, "geodesic.csv");
  ewg::write_path_csv(os, path);

  json j;
  j["samples"] = path.samples.size();
  j["energy_drift"] = path.energy_drift;
  j["complete"] = path.complete();
  if (path.exit) {
    j["exit_time"] = path.exit->t;
    j["exit_point"] = vec_json(path.exit->x);
  }
  write_json(opts.common, "geodesic.json", j);
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

// ---- traveltime -------------------------------------------------------------

struct TravelTimeOpts {
  CommonOpts common;
  std::string field_path;
  std::string sources;  // "x,y;x,y;..."
  int receivers = 16;
  double h = 2e-3;
};

int run_traveltime(const TravelTimeOpts& opts) {
  ewg::StiffnessField field = ewg::read_field_file(opts.field_path);
  ewg::QpGeometry geom(field);
  if (field.domain().kind != ewg::Domain::Kind::Annulus)
    throw ewg::InputError("traveltime: annulus domains only");

  std::vector<ewg::SmallVec> sources;
  std::stringstream ss(opts.sources);
  std::string item;
  while (std::getline(ss, item, ';'))
    if (!item.empty()) sources.push_back(ewg::parse_vec(item));
  if (sources.empty() && !opts.sources.empty())
    throw ewg::InputError("traveltime: malformed --sources");

  std::vector<ewg::SmallVec> receivers;
  const double R = field.domain().outer_radius;
  for (int i = 0; i < opts.receivers; ++i) {
    double beta = 2.0 * M_PI * i / opts.receivers;
    receivers.push_back(ewg::SmallVec{R * std::cos(beta), R * std::sin(beta)});
  }

  ewg::ShootConfig cfg;
  cfg.h = opts.h;
  ewg::TravelTimeTable table =
      ewg::travel_time_data(geom, sources, receivers, cfg, opts.common.threads);
  auto os = open_out(opts.common, "traveltime.csv");
  ewg::write_table_csv(os, table, field.dim());
  return kExitOk;
}

// ---- xray -------------------------------------------------------------------

struct XRayOpts {
  CommonOpts common;
  std::string field_path;
  int boundary_points = 64;
  int angles = 16;
  double h = 5e-3;
  std::string scalar = "1";
  std::string basis;  // comma separated tokens; empty = no experiment
};

int run_xray(const XRayOpts& opts) {
  ewg::StiffnessField field = ewg::read_field_file(opts.field_path);
  ewg::QpGeometry geom(field);
  ewg::XRayFan fan{opts.boundary_points, opts.angles, opts.h};

  ewg::ScalarField f = ewg::ScalarField::parse_token(opts.scalar);
  ewg::XRayDataset ds = ewg::xray_dataset(geom, f, fan, opts.common.threads);
  auto os = open_out(opts.common, "xray.csv");
  ewg::write_dataset_csv(os, ds);

  json j;
  j["rows"] = ds.rows.size();
  j["flagged"] = ds.flagged;
  if (!opts.basis.empty()) {
    std::vector<ewg::ScalarField> basis;
    std::stringstream ss(opts.basis);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) basis.push_back(ewg::ScalarField::parse_token(tok));
    ewg::InjectivityReport rep =
        ewg::desk_injectivity_experiment(geom, basis, fan, opts.common.threads);
    j["sigma_min"] = rep.sigma_min;
    j["cond"] = rep.cond;
    j["recovery_rel_err"] = rep.recovery_rel_err;
    j["rank_deficient"] = rep.rank_deficient;
    j["rows_used"] = rep.rows_used;
  }
  write_json(opts.common, "xray.json", j);
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

// ---- appendixb --------------------------------------------------------------

struct AppendixBOpts {
  CommonOpts common;
  std::string field_path;
  double r0 = 0;  // 0 = sweep
  int radii = 5;
};

int run_appendixb(const AppendixBOpts& opts) {
  ewg::StiffnessField field = ewg::read_field_file(opts.field_path);
  ewg::QpGeometry geom(field);
  const ewg::Domain& dom = field.domain();
  if (dom.kind != ewg::Domain::Kind::Annulus)
    throw ewg::InputError("appendixb: annulus domains only");

  std::vector<double> radii;
  if (opts.r0 > 0) {
    radii.push_back(opts.r0);
  } else {
    for (int i = 0; i < opts.radii; ++i) {
      double t = (i + 1.0) / (opts.radii + 1.0);
      radii.push_back(dom.inner_radius + t * (dom.outer_radius - dom.inner_radius));
    }
  }

  json fits = json::array();
  bool all_ok = true;
  for (double r0 : radii) {
    ewg::ExpansionFit fit = ewg::lowest_point_expansion_check(geom, r0);
    json f;
    f["r0"] = fit.r0;
    f["a"] = fit.a;
    f["slope_e1"] = fit.slope_e1;
    f["slope_e2"] = fit.slope_e2;
    f["slope_e3"] = fit.slope_e3;
    f["residual_r3"] = fit.residual_r3;
    f["residual_th2"] = fit.residual_th2;
    bool ok = fit.slope_e1 > 1.8 && fit.slope_e1 < 2.2 && fit.slope_e2 > 2.8 &&
              fit.slope_e2 < 3.2 && fit.slope_e3 > 3.8 && fit.slope_e3 < 4.2 &&
              std::abs(fit.residual_r3) < 1e-6 && std::abs(fit.residual_th2) < 1e-6;
    f["ok"] = ok;
    all_ok = all_ok && ok;
    fits.push_back(f);
  }
  json j;
  j["fits"] = fits;
  j["pass"] = all_ok;
  write_json(opts.common, "appendixb.json", j);
  std::cout << j.dump(2) << "\n";
  return all_ok ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Elastic wave geometry toolkit: slowness classification, qP Finsler "
               "construction, geodesics, travel times and the X-ray transform"};
  app.require_subcommand(1);

  Classify2dOpts classify;
  auto* c1 = app.add_subcommand("classify2d", "Exact 2D separateness classifier");
  c1->add_option("--tensor", classify.tensor_path, "Stiffness tensor file")->required();
  add_common(c1, classify.common);

  SlownessOpts slowness;
  auto* c2 = app.add_subcommand("slowness", "Slowness surface radii over sampled directions");
  c2->add_option("--tensor", slowness.tensor_path, "Stiffness tensor file")->required();
  c2->add_option("--samples", slowness.samples, "Direction count");
  c2->add_flag("--all-branches", slowness.all_branches, "Emit every qS branch column");
  add_common(c2, slowness.common);

  GapOpts gap;
  auto* c3 = app.add_subcommand("gap", "qP spectral gap margin over the unit sphere");
  c3->add_option("--tensor", gap.tensor_path, "Stiffness tensor file");
  c3->add_option("--field", gap.field_path, "Stiffness field file");
  c3->add_option("--samples", gap.samples, "Direction count");
  add_common(c3, gap.common);

  SingularityOpts sing;
  auto* c4 = app.add_subcommand("singularity", "Scheme/variety smoothness of the slowness surface");
  c4->add_option("--tensor", sing.tensor_path, "Stiffness tensor file")->required();
  c4->add_option("--search", sing.search, "exact | sampled");
  c4->add_option("--directions", sing.directions, "Ray count for sampled searches");
  c4->add_option("--tol-residual", sing.tol_residual, "Acceptance residual for singular points");
  add_common(c4, sing.common);

  FinslerCheckOpts fin;
  auto* c5 = app.add_subcommand("finsler-check", "Invariant battery at random samples");
  c5->add_option("--field", fin.field_path, "Stiffness field file")->required();
  c5->add_option("--samples", fin.samples, "Sample count");
  c5->add_option("--tol-roundtrip", fin.tol_roundtrip, "Legendre round-trip tolerance");
  c5->add_option("--tol-grad", fin.tol_grad, "Analytic vs FD gradient tolerance");
  add_common(c5, fin.common);

  GeodesicOpts geo;
  auto* c6 = app.add_subcommand("geodesic", "Integrate one qP geodesic");
  c6->add_option("--field", geo.field_path, "Stiffness field file")->required();
  c6->add_option("--x0", geo.x0, "Start point, comma separated")->required();
  c6->add_option("--y0", geo.y0, "Start velocity, comma separated")->required();
  c6->add_option("--step", geo.h, "Step size");
  c6->add_option("--tmax", geo.t_max, "Time horizon");
  add_common(c6, geo.common);

  TravelTimeOpts tt;
  auto* c7 = app.add_subcommand("traveltime", "Travel-time table from interior sources");
  c7->add_option("--field", tt.field_path, "Stiffness field file")->required();
  c7->add_option("--sources", tt.sources, "Sources \"x,y;x,y;...\"")->required();
  c7->add_option("--receivers", tt.receivers, "Receiver count on the outer boundary");
  c7->add_option("--step", tt.h, "Integrator step");
  add_common(c7, tt.common);

  XRayOpts xr;
  auto* c8 = app.add_subcommand("xray", "Forward geodesic X-ray transform over a boundary fan");
  c8->add_option("--field", xr.field_path, "Stiffness field file")->required();
  c8->add_option("--boundary-points", xr.boundary_points, "Fan boundary points");
  c8->add_option("--angles", xr.angles, "Takeoff angles per boundary point");
  c8->add_option("--step", xr.h, "Integrator step");
  c8->add_option("--scalar", xr.scalar, "Integrand token (1, r, r^2, ...)");
  c8->add_option("--basis", xr.basis, "Comma separated basis for the injectivity experiment");
  add_common(c8, xr.common);

  AppendixBOpts ab;
  auto* c9 = app.add_subcommand("appendixb", "Lowest-point expansion and reversibility fits");
  c9->add_option("--field", ab.field_path, "Stiffness field file")->required();
  c9->add_option("--r0", ab.r0, "Single starting radius (default: sweep)");
  c9->add_option("--radii", ab.radii, "Radius count for the sweep");
  add_common(c9, ab.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalidInput;
  }

  try {
    if (c1->parsed()) return run_classify2d(classify);
    if (c2->parsed()) return run_slowness(slowness);
    if (c3->parsed()) return run_gap(gap);
    if (c4->parsed()) return run_singularity(sing);
    if (c5->parsed()) return run_finsler_check(fin);
    if (c6->parsed()) return run_geodesic(geo);
    if (c7->parsed()) return run_traveltime(tt);
    if (c8->parsed()) return run_xray(xr);
    if (c9->parsed()) return run_appendixb(ab);
  } catch (const ewg::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const ewg::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
