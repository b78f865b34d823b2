#include "nlt/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlt/errors.hpp"
#include "nlt/kernel.hpp"

namespace nlt {

Grid1D Grid1D::covering(double x_left, double x_right, double dx,
                        double boundary_left, double boundary_right) {
  if (!(dx > 0.0) || !(x_right > x_left)) {
    throw GridError("covering: need dx > 0 and x_right > x_left");
  }
  // Round first so that lengths that are exact multiples of dx do not pick up
  // a spurious extra cell.
  const double ratio = (x_right - x_left) / dx;
  auto n = static_cast<std::size_t>(std::llround(ratio));
  if (static_cast<double>(n) * dx + x_left < x_right - 1e-9 * dx) ++n;
  Grid1D g{x_left, dx, std::max<std::size_t>(n, 2), boundary_left, boundary_right};
  g.validate();
  return g;
}

void Grid1D::validate() const {
  if (!(cell_width > 0.0) || !std::isfinite(cell_width)) {
    throw GridError("cell_width must be positive and finite");
  }
  if (n_cells < 2) throw GridError("a grid needs at least two cells");
  if (!std::isfinite(x_left)) throw GridError("x_left must be finite");
  if (!std::isfinite(boundary_left) || !std::isfinite(boundary_right)) {
    throw GridError("boundary states must be finite");
  }
}

bool Grid1D::same_geometry(const Grid1D& other) const {
  const double tol = 1e-12 * std::max(1.0, std::abs(x_left));
  return n_cells == other.n_cells &&
         std::abs(cell_width - other.cell_width) <= 1e-12 * cell_width &&
         std::abs(x_left - other.x_left) <= tol;
}

Profile::Profile(Grid1D grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  grid_.validate();
  if (values_.size() != grid_.n_cells) {
    throw GridError("profile has " + std::to_string(values_.size()) +
                    " values for " + std::to_string(grid_.n_cells) + " cells");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw NumericalBlowup("profile contains a non-finite value");
  }
}

Profile Profile::constant(const Grid1D& grid, double value) {
  Grid1D g = grid;
  g.boundary_left = value;
  g.boundary_right = value;
  return Profile(g, std::vector<double>(g.n_cells, value));
}

double Profile::min() const {
  double m = std::min(grid_.boundary_left, grid_.boundary_right);
  for (double v : values_) m = std::min(m, v);
  return m;
}

double Profile::max() const {
  double m = std::max(grid_.boundary_left, grid_.boundary_right);
  for (double v : values_) m = std::max(m, v);
  return m;
}

double Profile::mass() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s * grid_.cell_width;
}

double Profile::interpolate(double x, Anchor anchor) const {
  const double offset = anchor == Anchor::kNodes ? 0.0 : 0.5;
  const double s = (x - grid_.x_left) / grid_.cell_width - offset;
  const double fl = std::floor(s);
  const auto j = static_cast<std::ptrdiff_t>(fl);
  const double theta = s - fl;
  return (1.0 - theta) * extended(j) + theta * extended(j + 1);
}

double PiecewiseConstant::operator()(double x) const {
  double v = 0.0;
  for (const auto& p : pieces) {
    if (x > p.a && x < p.b) v += p.value;
  }
  return v;
}

double PiecewiseConstant::integral(double a, double b) const {
  double s = 0.0;
  for (const auto& p : pieces) {
    const double lo = std::max(a, p.a);
    const double hi = std::min(b, p.b);
    if (hi > lo) s += p.value * (hi - lo);
  }
  return s;
}

PiecewiseConstant& PiecewiseConstant::add(const PiecewiseConstant& other) {
  pieces.insert(pieces.end(), other.pieces.begin(), other.pieces.end());
  return *this;
}

Profile sample_cell_averages(const Grid1D& grid, const PiecewiseConstant& f) {
  grid.validate();
  std::vector<double> v(grid.n_cells);
  for (std::size_t j = 0; j < grid.n_cells; ++j) {
    const auto jj = static_cast<std::ptrdiff_t>(j);
    // fractions of the actual node span, so a cell inside one piece is exact
    const double a = grid.node(jj), b = grid.node(jj + 1);
    double s = 0.0;
    for (const auto& p : f.pieces) {
      const double lo = std::max(a, p.a), hi = std::min(b, p.b);
      if (hi > lo) s += p.value * ((hi - lo) / (b - a));
    }
    v[j] = s;
  }
  return Profile(grid, std::move(v));
}

double total_variation(const Profile& p) {
  const auto v = p.values();
  double tv = std::abs(v.front() - p.grid().boundary_left) +
              std::abs(p.grid().boundary_right - v.back());
  for (std::size_t j = 0; j + 1 < v.size(); ++j) tv += std::abs(v[j + 1] - v[j]);
  return tv;
}

TvDecomposition tv_decomposition(const Profile& p) {
  const auto v = p.values();
  const auto down = [](double from, double to) { return std::max(0.0, from - to); };
  double neg = down(p.grid().boundary_left, v.front()) + down(v.back(), p.grid().boundary_right);
  for (std::size_t j = 0; j + 1 < v.size(); ++j) neg += down(v[j], v[j + 1]);
  return {p.grid().boundary_right - p.grid().boundary_left, neg};
}

double l1_distance(const Profile& p, const Profile& q) {
  if (!p.grid().same_geometry(q.grid())) throw GridError("l1_distance: grid mismatch");
  double s = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) s += std::abs(p[j] - q[j]);
  return s * p.grid().cell_width;
}

double variation_on(const Profile& p, double a, double b, Anchor anchor) {
  if (b <= a) return 0.0;
  const Grid1D& g = p.grid();
  const double offset = anchor == Anchor::kNodes ? 0.0 : 0.5;
  const auto index_of = [&](double x) { return (x - g.x_left) / g.cell_width - offset; };
  // Segment k joins samples k and k+1; slopes are constant on each segment.
  const auto k_lo = static_cast<std::ptrdiff_t>(std::floor(index_of(a)));
  const auto k_hi = static_cast<std::ptrdiff_t>(std::floor(index_of(b)));
  double total = 0.0;
  for (std::ptrdiff_t k = k_lo; k <= k_hi; ++k) {
    const double seg_lo = anchor_position(g, k, anchor);
    const double seg_hi = seg_lo + g.cell_width;
    const double lo = std::max(a, seg_lo);
    const double hi = std::min(b, seg_hi);
    if (hi <= lo) continue;
    const double slope = (p.extended(k + 1) - p.extended(k)) / g.cell_width;
    total += std::abs(slope) * (hi - lo);
  }
  return total;
}

namespace {

// Integral over [0, h] of |w_a + (w_b - w_a) s/h - c|.
double linear_minus_constant(double wa, double wb, double c, double h) {
  const double fa = wa - c;
  const double fb = wb - c;
  if (fa * fb >= 0.0) return 0.5 * h * std::abs(fa + fb);
  // Sign change inside the cell: two triangles.
  const double root = fa / (fa - fb);
  return 0.5 * h * (root * std::abs(fa) + (1.0 - root) * std::abs(fb));
}

}  // namespace

double mollify_defect(const Profile& p, const DiscreteKernel& dk) {
  const std::vector<double> nodes = convolve_nodes(p, dk, p.size() + 1);
  const double h = p.grid().cell_width;
  double s = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    s += linear_minus_constant(nodes[j], nodes[j + 1], p[j], h);
  }
  return s;
}

}  // namespace nlt
