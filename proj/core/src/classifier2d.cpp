#include "ewg/classifier2d.hpp"

#include <cmath>
#include <vector>

#include "ewg/errors.hpp"

namespace ewg {

namespace {

void check_2d(const StiffnessQ& c) {
  if (c.dim() != 2) throw InputError("classifier2d: tensor must be two-dimensional");
}

struct Components {
  Rat c1111, c1122, c1112, c2222, c1222, c1212;
};

Components components(const StiffnessQ& c) {
  return {c.at(0, 0, 0, 0), c.at(0, 0, 1, 1), c.at(0, 0, 0, 1),
          c.at(1, 1, 1, 1), c.at(0, 1, 1, 1), c.at(0, 1, 0, 1)};
}

// Gap functional (h11-h22)^2 + 4 h12^2 at angle theta, in doubles.
double gap_value(const Components& k, double theta) {
  double p1 = std::cos(theta), p2 = std::sin(theta);
  double f1 = rat_to_double(k.c1111 - k.c1212) * p1 * p1 +
              2.0 * rat_to_double(k.c1112 - k.c1222) * p1 * p2 +
              rat_to_double(k.c1212 - k.c2222) * p2 * p2;
  double f2 = rat_to_double(k.c1112) * p1 * p1 +
              rat_to_double(k.c1212 + k.c1122) * p1 * p2 + rat_to_double(k.c1222) * p2 * p2;
  return f1 * f1 + 4.0 * f2 * f2;
}

std::optional<SmallVec> find_witness(const Components& k) {
  std::vector<double> candidates;  // directions as angles

  // Roots of F2 read as a quadratic in t = p2/p1: c1222 t^2 + (c1212+c1122) t + c1112.
  Rat A = k.c1222, B = k.c1212 + k.c1122, C = k.c1112;
  if (A != 0) {
    Rat disc = B * B - 4 * A * C;
    if (disc >= 0) {
      if (auto root = rat_sqrt_exact(disc)) {
        for (int sgn : {-1, 1}) {
          Rat t = (-B + Rat(sgn) * (*root)) / (2 * A);
          candidates.push_back(std::atan2(rat_to_double(t), 1.0));
        }
      } else {
        double d = std::sqrt(rat_to_double(disc));
        double a = rat_to_double(A), b = rat_to_double(B);
        candidates.push_back(std::atan2((-b + d) / (2 * a), 1.0));
        candidates.push_back(std::atan2((-b - d) / (2 * a), 1.0));
      }
    }
  } else if (B != 0) {
    candidates.push_back(std::atan2(rat_to_double(-C / B), 1.0));
    candidates.push_back(M_PI / 2);  // p1 = 0 root of F2 when c1222 = 0
  } else if (C == 0) {
    // F2 identically zero: every direction solves h12 = 0; F1 decides.
    candidates.push_back(0.0);
    candidates.push_back(M_PI / 2);
    candidates.push_back(M_PI / 4);
  } else {
    candidates.push_back(M_PI / 2);
  }

  // Oracle refinement: global scan plus golden-section polish.
  const int kScan = 512;
  double best_theta = 0.0, best = 1e300;
  for (int i = 0; i < kScan; ++i) {
    double theta = M_PI * i / kScan;
    double v = gap_value(k, theta);
    if (v < best) {
      best = v;
      best_theta = theta;
    }
  }
  double span = M_PI / kScan;
  candidates.push_back(golden_section_min(
      [&](double th) { return gap_value(k, th); }, best_theta - span, best_theta + span, 1e-14));

  double scale = 0.0;
  for (const Rat* v : {&k.c1111, &k.c1122, &k.c1112, &k.c2222, &k.c1222, &k.c1212})
    scale = std::max(scale, std::abs(rat_to_double(*v)));
  scale = std::max(1.0, scale * scale);

  double pick = -1, pick_val = 1e300;
  for (double theta : candidates) {
    double v = gap_value(k, theta);
    if (v < pick_val) {
      pick_val = v;
      pick = theta;
    }
  }
  if (pick_val > 1e-16 * scale * scale) return std::nullopt;
  return SmallVec{std::cos(pick), std::sin(pick)};
}

}  // namespace

ClassifierReport classifier_invariants(const StiffnessQ& c) {
  check_2d(c);
  Components k = components(c);
  ClassifierReport r;
  r.D1 = (k.c1212 + k.c1122) * (k.c1212 + k.c1122) - 4 * k.c1112 * k.c1222;
  r.D2 = (k.c1112 - k.c1222) * (k.c1112 - k.c1222) +
         (k.c1111 - k.c1212) * (k.c2222 - k.c1212);
  r.D = r.D1 + r.D2;
  r.L = k.c1122 * k.c1222 + k.c1111 * k.c1222 - k.c1112 * k.c2222 - k.c1122 * k.c1112;
  r.R = r.L * r.L - r.D1 * r.D2;
  r.multiple_eigenvalue = (r.R == 0 && r.D >= 0);
  if (r.multiple_eigenvalue) r.witness = find_witness(k);
  return r;
}

bool has_multiple_eigenvalue(const StiffnessQ& c) {
  check_2d(c);
  Components k = components(c);
  Rat d1 = (k.c1212 + k.c1122) * (k.c1212 + k.c1122) - 4 * k.c1112 * k.c1222;
  Rat d2 = (k.c1112 - k.c1222) * (k.c1112 - k.c1222) +
           (k.c1111 - k.c1212) * (k.c2222 - k.c1212);
  Rat l = k.c1122 * k.c1222 + k.c1111 * k.c1222 - k.c1112 * k.c2222 - k.c1122 * k.c1112;
  Rat r = l * l - d1 * d2;
  return r == 0 && d1 + d2 >= 0;
}

std::pair<MultiPoly, MultiPoly> build_f1_f2(const StiffnessQ& c) {
  check_2d(c);
  Components k = components(c);
  MultiPoly p1 = MultiPoly::variable("p1");
  MultiPoly p2 = MultiPoly::variable("p2");
  MultiPoly f1 = (k.c1111 - k.c1212) * (p1 * p1) + Rat(2) * (k.c1112 - k.c1222) * (p1 * p2) +
                 (k.c1212 - k.c2222) * (p2 * p2);
  MultiPoly f2 = k.c1112 * (p1 * p1) + (k.c1212 + k.c1122) * (p1 * p2) + k.c1222 * (p2 * p2);
  return {f1, f2};
}

}  // namespace ewg
