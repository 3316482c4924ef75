#include "ewg/sampling.hpp"

#include <cmath>

namespace ewg {

std::vector<SmallVec> circle_directions(int count) {
  std::vector<SmallVec> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    double theta = 2.0 * M_PI * i / count;
    out.push_back(SmallVec{std::cos(theta), std::sin(theta)});
  }
  return out;
}

std::vector<SmallVec> fibonacci_sphere(int count) {
  std::vector<SmallVec> out;
  out.reserve(count);
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  for (int i = 0; i < count; ++i) {
    double z = 1.0 - (2.0 * i + 1.0) / count;
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double phi = 2.0 * M_PI * std::fmod(i / golden, 1.0);
    out.push_back(SmallVec{r * std::cos(phi), r * std::sin(phi), z});
  }
  return out;
}

std::vector<SmallVec> unit_directions(int dim, int count) {
  if (dim == 2) return circle_directions(count);
  if (dim == 3) return fibonacci_sphere(count);
  std::mt19937_64 rng(20240801u + static_cast<unsigned>(dim));
  std::vector<SmallVec> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(random_unit_vector(rng, dim));
  return out;
}

SmallVec random_unit_vector(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  SmallVec v(dim);
  double n = 0.0;
  do {
    for (int i = 0; i < dim; ++i) v[i] = gauss(rng);
    n = norm(v);
  } while (n < 1e-12);
  return v * (1.0 / n);
}

}  // namespace ewg
