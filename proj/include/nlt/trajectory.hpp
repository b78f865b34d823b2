#pragma once

#include <string>
#include <vector>

#include "nlt/grid.hpp"
#include "nlt/velocity.hpp"

namespace nlt {

struct Snapshot {
  double t;
  Profile u;
  Profile w;  // look-ahead average; equals u for local runs
};

struct StepRecord {
  double dt;
  double mass;  // after the step
  double min_u, max_u;
  double min_w, max_w;  // of the field that drove the step
};

/// Parameters of the run that produced a trajectory.
struct RunEcho {
  std::string kind;  // "nonlocal" or "local"
  std::string scheme;
  std::string kernel;
  std::string velocity;
  double epsilon = 0.0;
  double cell_width = 0.0;
  double dt_cfl = 0.0;
  double cfl = 0.0;
  double t_end = 0.0;
  std::size_t kernel_cells = 0;
};

class Trajectory {
 public:
  Trajectory(RunEcho echo, VelocityModel velocity, Anchor w_anchor)
      : echo(std::move(echo)), velocity(std::move(velocity)), w_anchor(w_anchor) {}

  RunEcho echo;
  VelocityModel velocity;
  Anchor w_anchor;
  std::vector<Snapshot> snapshots;
  std::vector<StepRecord> steps;
  std::vector<std::string> warnings;
  double initial_mass = 0.0;
  double inflow = 0.0;   // time integral of the left boundary flux
  double outflow = 0.0;  // time integral of the right boundary flux

  const Grid1D& grid() const { return snapshots.front().u.grid(); }
  double t_first() const { return snapshots.front().t; }
  double t_last() const { return snapshots.back().t; }
  double max_snapshot_spacing() const;
  double final_mass() const;
  /// |mass(t_last) - mass(0)| / t_last (0 for zero-length runs).
  double mass_drift_rate() const;
  /// Mass balance residual once boundary fluxes are accounted for.
  double mass_ledger_residual() const;
  /// Index of the last snapshot with time <= t.
  std::size_t snapshot_before(double t) const;
};

/// `count` + 1 equally spaced times on [0, t_end].
std::vector<double> uniform_times(double t_end, std::size_t count);

}  // namespace nlt
