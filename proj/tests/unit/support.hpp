#pragma once

#include <random>
#include <vector>

#include "nlt/grid.hpp"

namespace nlt::testing {

// Random profile with values in [0, 1] and random boundary states.
inline Profile random_profile(std::mt19937_64& rng, const Grid1D& shape) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  Grid1D g = shape;
  g.boundary_left = U(rng);
  g.boundary_right = U(rng);
  std::vector<double> v(g.n_cells);
  for (auto& x : v) x = U(rng);
  return Profile(g, std::move(v));
}

inline Grid1D grid(double x_left, double dx, std::size_t n, double bl = 0.0, double br = 0.0) {
  Grid1D g;
  g.x_left = x_left;
  g.cell_width = dx;
  g.n_cells = n;
  g.boundary_left = bl;
  g.boundary_right = br;
  return g;
}

}  // namespace nlt::testing
