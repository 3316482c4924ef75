#ifndef EWG_SAMPLING_HPP
#define EWG_SAMPLING_HPP

#include <random>
#include <vector>

#include "ewg/linalg.hpp"

namespace ewg {

/// Uniform angles on the unit circle, first sample at angle 0.
std::vector<SmallVec> circle_directions(int count);

/// Fibonacci lattice on the unit 2-sphere.
std::vector<SmallVec> fibonacci_sphere(int count);

/// Dispatches on dimension: circle for n=2, Fibonacci lattice for n=3,
/// seeded Gaussian directions otherwise.
std::vector<SmallVec> unit_directions(int dim, int count);

SmallVec random_unit_vector(std::mt19937_64& rng, int dim);

}  // namespace ewg

#endif
