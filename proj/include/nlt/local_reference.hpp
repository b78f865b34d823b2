#pragma once

#include <vector>

#include "nlt/grid.hpp"
#include "nlt/trajectory.hpp"
#include "nlt/velocity.hpp"

namespace nlt {

struct LocalRunConfig {
  Grid1D grid;
  VelocityModel velocity;
  double t_end;
  double cfl = 0.5;
  std::vector<double> snapshot_times;  // empty: {0, t_end}
  bool enforce_bounds = true;
};

/// Exact Godunov flux for Greenshields, Engquist-Osher for other laws.
double godunov_flux(const VelocityModel& vm, double u_left, double u_right);

/// cfl * dx / max|f'|.
double local_cfl_dt(const LocalRunConfig& cfg);

/// One explicit step of the monotone scheme.
Profile local_step(const Profile& u, const VelocityModel& vm, double dt);

/// Solution of the local conservation law; snapshot w fields equal u and are
/// cell-centred.
Trajectory solve_local(const LocalRunConfig& cfg, const Profile& u0);

/// Entropy solution of the Greenshields Riemann problem at (t, x).
/// Throws UnsupportedModel for other laws.
double exact_riemann(const VelocityModel& vm, double u_left, double u_right, double t,
                     double x);

/// Largest violation over all cells of the discrete Kruzkov inequality
///   |u_j^+ - c| - |u_j - c| + dt/dx (G_{j+1/2} - G_{j-1/2}) <= 0
/// with the Crandall-Majda numerical entropy flux of the local scheme.
double cell_entropy_violation(const Profile& before, const Profile& after,
                              const VelocityModel& vm, double dt, double c);

}  // namespace nlt
