#pragma once

#include <vector>

#include "nlt/grid.hpp"
#include "nlt/kernel.hpp"
#include "nlt/trajectory.hpp"
#include "nlt/velocity.hpp"

namespace nlt {

struct NonlocalRunConfig {
  Grid1D grid;
  KernelSpec kernel;
  double epsilon;
  VelocityModel velocity;
  double t_end;
  double cfl = 0.5;
  std::vector<double> snapshot_times;  // empty: {0, t_end}
  double tail_tol = kDefaultTailTol;
  int min_cells_per_eps = kDefaultMinCellsPerEps;
  bool enforce_bounds = true;  // throw BoundsViolation when u or w leaves [0, 1]
};

inline constexpr double kSpeedFloor = 1e-12;
inline constexpr double kBoundsTol = 1e-12;

/// cfl * dx / max(max|V|, floor), clamped to t_end when t_end > 0.
double cfl_dt(const NonlocalRunConfig& cfg);

struct StepOutput {
  std::vector<double> u;  // updated cell averages
  std::vector<double> w;  // look-ahead averages at nodes 0..n that drove the step
  double flux_in;         // numerical flux through the left domain edge
  double flux_out;        // numerical flux through the right domain edge
  bool fallback;          // Lax-Friedrichs path taken (V changes sign)
};

/// One explicit Euler step of the upwind scheme
///   u_j <- u_j - dt/dx (V(w_{j+1/2}) u_j - V(w_{j-1/2}) u_{j-1}),
/// where w_{j+1/2} is the look-ahead average anchored at the interface.
/// Throws StabilityError if dt exceeds the monotonicity limit.
StepOutput step_raw(const Profile& u, const DiscreteKernel& dk, const VelocityModel& vm,
                    double dt);

Profile step(const Profile& u, const DiscreteKernel& dk, const VelocityModel& vm, double dt);

/// Marches u0 to cfg.t_end, emitting snapshots at exactly the requested times.
Trajectory solve(const NonlocalRunConfig& cfg, const Profile& u0);

/// Distance that features of the solution can travel in [0, t_end], plus the
/// look-ahead window: the margin to keep between data and domain edges.
double domain_margin(double t_end, double max_speed, double window_length);

}  // namespace nlt
