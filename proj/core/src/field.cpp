#include "ewg/field.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ewg/errors.hpp"
#include "ewg/io.hpp"
#include "ewg/textcfg.hpp"

namespace ewg {

Domain Domain::annulus(int dim, double inner_radius, double outer_radius) {
  if (!(inner_radius > 0.0 && inner_radius < outer_radius))
    throw InputError("annulus requires 0 < inner_radius < outer_radius");
  Domain d;
  d.kind = Kind::Annulus;
  d.dim = dim;
  d.inner_radius = inner_radius;
  d.outer_radius = outer_radius;
  return d;
}

Domain Domain::box(const SmallVec& lo, const SmallVec& hi) {
  if (lo.size() != hi.size()) throw InputError("box corners must share a dimension");
  Domain d;
  d.kind = Kind::Box;
  d.dim = lo.size();
  d.lo = lo;
  d.hi = hi;
  for (int i = 0; i < d.dim; ++i)
    if (!(lo[i] < hi[i])) throw InputError("box requires lo < hi componentwise");
  return d;
}

double Domain::signed_distance(const SmallVec& x) const {
  if (kind == Kind::Annulus) {
    double r = norm(x);
    return std::max(inner_radius - r, r - outer_radius);
  }
  double sd = -1e300;
  for (int i = 0; i < dim; ++i) {
    sd = std::max(sd, lo[i] - x[i]);
    sd = std::max(sd, x[i] - hi[i]);
  }
  return sd;
}

bool Domain::contains(const SmallVec& x, double tol) const {
  return signed_distance(x) <= tol;
}

double Domain::diameter() const {
  if (kind == Kind::Annulus) return 2.0 * outer_radius;
  return distance(lo, hi);
}

RadialProfile RadialProfile::polynomial(std::vector<double> ascending_coeffs) {
  RadialProfile p;
  p.poly_ = true;
  p.coeffs_ = std::move(ascending_coeffs);
  if (p.coeffs_.empty()) p.coeffs_.push_back(0.0);
  return p;
}

RadialProfile RadialProfile::table(std::vector<double> r, std::vector<double> value) {
  if (r.size() != value.size() || r.size() < 2)
    throw InputError("profile table needs matching r/value lists with >= 2 entries");
  for (std::size_t i = 1; i < r.size(); ++i)
    if (!(r[i] > r[i - 1])) throw InputError("profile table radii must increase");
  RadialProfile p;
  p.poly_ = false;
  p.r_ = std::move(r);
  p.v_ = std::move(value);

  // Fritsch-Carlson monotone cubic slopes.
  const std::size_t n = p.r_.size();
  std::vector<double> d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i)
    d[i] = (p.v_[i + 1] - p.v_[i]) / (p.r_[i + 1] - p.r_[i]);
  p.slope_.resize(n);
  p.slope_[0] = d[0];
  p.slope_[n - 1] = d[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i)
    p.slope_[i] = (d[i - 1] * d[i] > 0.0) ? 0.5 * (d[i - 1] + d[i]) : 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (d[i] == 0.0) {
      p.slope_[i] = p.slope_[i + 1] = 0.0;
      continue;
    }
    double a = p.slope_[i] / d[i];
    double b = p.slope_[i + 1] / d[i];
    double s = a * a + b * b;
    if (s > 9.0) {
      double tau = 3.0 / std::sqrt(s);
      p.slope_[i] = tau * a * d[i];
      p.slope_[i + 1] = tau * b * d[i];
    }
  }
  return p;
}

double RadialProfile::operator()(double r) const {
  if (poly_) {
    double v = 0.0;
    for (std::size_t i = coeffs_.size(); i-- > 0;) v = v * r + coeffs_[i];
    return v;
  }
  std::size_t n = r_.size();
  double rc = std::clamp(r, r_.front(), r_.back());
  std::size_t k = std::upper_bound(r_.begin(), r_.end(), rc) - r_.begin();
  if (k == 0) k = 1;
  if (k >= n) k = n - 1;
  std::size_t i = k - 1;
  double h = r_[k] - r_[i];
  double t = (rc - r_[i]) / h;
  double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
  double h10 = t * (1 - t) * (1 - t);
  double h01 = t * t * (3 - 2 * t);
  double h11 = t * t * (t - 1);
  return h00 * v_[i] + h10 * h * slope_[i] + h01 * v_[k] + h11 * h * slope_[k];
}

double RadialProfile::derivative(double r) const {
  if (poly_) {
    double v = 0.0;
    for (std::size_t i = coeffs_.size(); i-- > 1;) v = v * r + coeffs_[i] * static_cast<double>(i);
    return v;
  }
  double h = 1e-6 * std::max(1.0, std::abs(r));
  return ((*this)(r + h) - (*this)(r - h)) / (2 * h);
}

StiffnessField StiffnessField::constant(const StiffnessD& c, Domain domain, int regularity) {
  if (c.dim() != domain.dim) throw InputError("field: tensor/domain dimension mismatch");
  StiffnessField f(Kind::Constant, domain, regularity);
  f.base_ = c;
  return f;
}

StiffnessField StiffnessField::isotropic_radial(RadialProfile lambda, RadialProfile mu,
                                                Domain domain, int regularity) {
  StiffnessField f(Kind::IsotropicRadial, domain, regularity);
  f.lambda_r_ = std::make_shared<RadialProfile>(std::move(lambda));
  f.mu_r_ = std::make_shared<RadialProfile>(std::move(mu));
  return f;
}

StiffnessField StiffnessField::perturbed_isotropic(double lambda0, double mu0,
                                                   const StiffnessD& delta, Domain domain,
                                                   int regularity) {
  if (delta.dim() != domain.dim) throw InputError("field: delta/domain dimension mismatch");
  StiffnessField f(Kind::PerturbedIsotropic, domain, regularity);
  f.lambda0_ = lambda0;
  f.mu0_ = mu0;
  f.base_ = make_isotropic<double>(domain.dim, lambda0, mu0);
  f.delta_ = delta;
  f.has_delta_ = true;
  return f;
}

StiffnessD StiffnessField::evaluate(const SmallVec& x) const {
  StiffnessD out(dim());
  evaluate_into(x, out);
  return out;
}

void StiffnessField::evaluate_into(const SmallVec& x, StiffnessD& out) const {
  const int n = dim();
  if (x.size() != n) throw InputError("field evaluation: point dimension mismatch");
  switch (kind_) {
    case Kind::Constant:
      out = base_;
      return;
    case Kind::PerturbedIsotropic: {
      out = base_;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
              out.set_entry(i, j, k, l, out.at(i, j, k, l) + delta_.at(i, j, k, l));
      return;
    }
    case Kind::IsotropicRadial: {
      double r = norm(x);
      out = make_isotropic<double>(n, (*lambda_r_)(r), (*mu_r_)(r));
      return;
    }
  }
}

bool StiffnessField::is_isotropic() const {
  if (kind_ == Kind::IsotropicRadial) return true;
  if (kind_ != Kind::Constant) return false;
  const int n = dim();
  StiffnessD iso = make_isotropic<double>(n, base_.at(0, 0, 1, 1), base_.at(0, 1, 0, 1));
  for (const auto& q : StiffnessD::canonical_quadruples(n)) {
    double a = base_.at(q[0], q[1], q[2], q[3]);
    double b = iso.at(q[0], q[1], q[2], q[3]);
    if (std::abs(a - b) > 1e-12 * std::max({1.0, std::abs(a), std::abs(b)})) return false;
  }
  return true;
}

double StiffnessField::lambda_at(double r) const {
  if (kind_ == Kind::IsotropicRadial) return (*lambda_r_)(r);
  if (kind_ == Kind::PerturbedIsotropic) return lambda0_;
  if (kind_ == Kind::Constant && is_isotropic()) return base_.at(0, 0, 1, 1);
  throw InputError("lambda_at: field has no radial profile");
}

double StiffnessField::mu_at(double r) const {
  if (kind_ == Kind::IsotropicRadial) return (*mu_r_)(r);
  if (kind_ == Kind::PerturbedIsotropic) return mu0_;
  if (kind_ == Kind::Constant && is_isotropic()) return base_.at(0, 1, 0, 1);
  throw InputError("mu_at: field has no radial profile");
}

namespace {

std::vector<double> parse_double_list(const std::string& text, const std::string& origin) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      double v = std::stod(item, &pos);
      while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
      if (pos != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw InputError(origin + ": malformed number list: " + text);
    }
  }
  if (out.empty()) throw InputError(origin + ": empty number list");
  return out;
}

RadialProfile parse_profile(const TextConfig& cfg, const std::string& section,
                            const std::string& origin) {
  cfg.require_known_keys(section, {"poly", "r_samples", "values"});
  if (cfg.has(section, "poly")) {
    if (cfg.has(section, "r_samples") || cfg.has(section, "values"))
      throw InputError(origin + ": [" + section + "] mixes poly and table keys");
    return RadialProfile::polynomial(parse_double_list(*cfg.get(section, "poly"), origin));
  }
  if (!cfg.has(section, "r_samples") || !cfg.has(section, "values"))
    throw InputError(origin + ": [" + section + "] needs poly or r_samples/values");
  return RadialProfile::table(parse_double_list(*cfg.get(section, "r_samples"), origin),
                              parse_double_list(*cfg.get(section, "values"), origin));
}

Domain parse_domain(const TextConfig& cfg, int dim, const std::string& origin) {
  if (!cfg.has_section("domain")) throw InputError(origin + ": missing [domain] section");
  const std::string type = cfg.require("domain", "type");
  if (type == "annulus") {
    cfg.require_known_keys("domain", {"type", "inner_radius", "outer_radius"});
    double inner = cfg.require_double("domain", "inner_radius");
    double outer = cfg.has("domain", "outer_radius") ? cfg.require_double("domain", "outer_radius")
                                                     : 1.0;
    return Domain::annulus(dim, inner, outer);
  }
  if (type == "box") {
    cfg.require_known_keys("domain", {"type", "lo", "hi"});
    SmallVec lo = parse_vec(cfg.require("domain", "lo"));
    SmallVec hi = parse_vec(cfg.require("domain", "hi"));
    if (lo.size() != dim || hi.size() != dim)
      throw InputError(origin + ": box corner dimension mismatch");
    return Domain::box(lo, hi);
  }
  throw InputError(origin + ": unknown domain type \"" + type + "\"");
}

StiffnessD parse_components_section(const TextConfig& cfg, const std::string& section, int dim,
                                    const std::string& origin) {
  StiffnessD c(dim);
  for (const auto& key : cfg.keys(section)) {
    if (key.size() != 4 ||
        !std::all_of(key.begin(), key.end(), [&](char ch) { return ch >= '1' && ch <= '0' + dim; }))
      throw InputError(origin + ": unknown key '" + key + "' in section [" + section + "]");
    int i = key[0] - '1', j = key[1] - '1', k = key[2] - '1', l = key[3] - '1';
    auto canon = StiffnessD::canonical_quadruples(dim);
    std::array<int, 4> q{i, j, k, l};
    if (std::find(canon.begin(), canon.end(), q) == canon.end())
      throw InputError(origin + ": unknown key '" + key + "' in section [" + section +
                       "] (not a canonical quadruple)");
    c.set_orbit(i, j, k, l, cfg.require_double(section, key));
  }
  return c;
}

}  // namespace

StiffnessField parse_field_text(const std::string& text, const std::string& origin) {
  TextConfig cfg = TextConfig::parse_string(text, origin);
  cfg.require_known_keys("", {"dim", "kind", "regularity"});
  int dim = static_cast<int>(cfg.require_int("", "dim"));
  if (dim < 2 || dim > 3) throw InputError(origin + ": dim must be 2 or 3");
  const std::string kind = cfg.require("", "kind");
  int regularity = cfg.has("", "regularity")
                       ? static_cast<int>(cfg.require_int("", "regularity"))
                       : 99;
  Domain domain = parse_domain(cfg, dim, origin);

  if (kind == "constant") {
    cfg.require_known_sections({"domain", "tensor"});
    if (!cfg.has_section("tensor")) throw InputError(origin + ": missing [tensor] section");
    StiffnessD c(dim);
    if (cfg.has("tensor", "lambda") || cfg.has("tensor", "mu")) {
      cfg.require_known_keys("tensor", {"lambda", "mu"});
      c = make_isotropic<double>(dim, cfg.require_double("tensor", "lambda"),
                                 cfg.require_double("tensor", "mu"));
    } else {
      c = parse_components_section(cfg, "tensor", dim, origin);
    }
    return StiffnessField::constant(c, domain, regularity);
  }
  if (kind == "isotropic-radial") {
    cfg.require_known_sections({"domain", "lambda", "mu"});
    return StiffnessField::isotropic_radial(parse_profile(cfg, "lambda", origin),
                                            parse_profile(cfg, "mu", origin), domain, regularity);
  }
  if (kind == "perturbed-isotropic") {
    cfg.require_known_sections({"domain", "base", "delta"});
    cfg.require_known_keys("base", {"lambda", "mu"});
    StiffnessD delta = parse_components_section(cfg, "delta", dim, origin);
    return StiffnessField::perturbed_isotropic(cfg.require_double("base", "lambda"),
                                               cfg.require_double("base", "mu"), delta, domain,
                                               regularity);
  }
  throw InputError(origin + ": unknown field kind \"" + kind + "\"");
}

StiffnessField read_field_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_field_text(ss.str(), path);
}

}  // namespace ewg
