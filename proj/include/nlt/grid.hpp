#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nlt {

/// Uniform 1-D grid of half-open cells [x_j, x_j + dx[, extended beyond
/// both ends by constant boundary states.
struct Grid1D {
  double x_left = 0.0;
  double cell_width = 1.0;
  std::size_t n_cells = 2;
  double boundary_left = 0.0;
  double boundary_right = 0.0;

  /// Smallest grid with spacing `dx` whose nodes start at `x_left` and reach
  /// at least `x_right`.
  static Grid1D covering(double x_left, double x_right, double dx,
                         double boundary_left = 0.0,
                         double boundary_right = 0.0);

  void validate() const;

  double node(std::ptrdiff_t j) const {
    return x_left + static_cast<double>(j) * cell_width;
  }
  double center(std::ptrdiff_t j) const {
    return x_left + (static_cast<double>(j) + 0.5) * cell_width;
  }
  double x_right() const { return node(static_cast<std::ptrdiff_t>(n_cells)); }

  /// Same geometry (origin, spacing, size); boundary states are ignored.
  bool same_geometry(const Grid1D& other) const;
};

/// Where the samples of a field live inside each cell. Cell averages (u)
/// sit at centers; look-ahead convolution values (w) at left cell edges.
enum class Anchor { kCenters, kNodes };

inline double anchor_position(const Grid1D& g, std::ptrdiff_t j, Anchor a) {
  return a == Anchor::kNodes ? g.node(j) : g.center(j);
}

/// Grid function with constant extension by the grid's boundary states.
class Profile {
 public:
  Profile(Grid1D grid, std::vector<double> values);

  static Profile constant(const Grid1D& grid, double value);

  const Grid1D& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t j) const { return values_[j]; }

  /// Value at any integer index, boundary states outside [0, n).
  double extended(std::ptrdiff_t j) const {
    if (j < 0) return grid_.boundary_left;
    if (j >= static_cast<std::ptrdiff_t>(values_.size())) return grid_.boundary_right;
    return values_[static_cast<std::size_t>(j)];
  }

  /// Extrema over the interior values and both boundary states.
  double min() const;
  double max() const;

  /// dx * sum of values.
  double mass() const;

  /// Linear interpolation between samples placed according to `anchor`.
  double interpolate(double x, Anchor anchor) const;

 private:
  Grid1D grid_;
  std::vector<double> values_;
};

/// Open interval ]a, b[ carrying a constant value; endpoints may be infinite.
struct Interval {
  double a;
  double b;
  double value;
};

/// Superposition of interval indicators, used to describe exact initial data.
struct PiecewiseConstant {
  std::vector<Interval> pieces;

  double operator()(double x) const;
  double integral(double a, double b) const;
  PiecewiseConstant& add(const PiecewiseConstant& other);
};

/// Exact cell averages of `f` on `grid` (boundary states come from `grid`).
Profile sample_cell_averages(const Grid1D& grid, const PiecewiseConstant& f);

double total_variation(const Profile& p);

struct TvDecomposition {
  double jump_across;    // boundary_right - boundary_left
  double negative_part;  // sum of downward jumps, boundaries included
};

/// Splits the variation as TV = jump_across + 2 * negative_part.
TvDecomposition tv_decomposition(const Profile& p);

/// dx * sum |p_j - q_j|; throws GridError on geometry mismatch.
double l1_distance(const Profile& p, const Profile& q);

/// Integral of |p'| over [a, b] for the piecewise-linear interpolant of the
/// samples, with partial segments at both ends.
double variation_on(const Profile& p, double a, double b, Anchor anchor);

class DiscreteKernel;

/// L1 distance between a cell-averaged profile and its look-ahead
/// convolution. The convolution is reconstructed piecewise-linearly between
/// its node samples and integrated exactly against the constant cell values.
double mollify_defect(const Profile& p, const DiscreteKernel& dk);

}  // namespace nlt
