#pragma once

#include <string>
#include <vector>

#include "nlt/errors.hpp"
#include "nlt/trajectory.hpp"

namespace nlt {

struct PathSample {
  double t;
  double x;
};

/// Characteristic line dX/dt = V(w(t, X)), X(s) = xi.
struct CharacteristicPath {
  double s = 0.0;
  double xi = 0.0;
  std::vector<PathSample> samples;  // ordered along the direction of integration
  std::string method = "rk4";

  /// Linear interpolation between samples; throws SnapshotError outside the
  /// traced time range.
  double at(double t) const;
  double t_min() const;
  double t_max() const;
};

/// Raised when a path leaves the grid; carries the part traced so far.
class DomainExit : public Error {
 public:
  DomainExit(const std::string& what, CharacteristicPath partial)
      : Error(what), partial_(std::move(partial)) {}
  const CharacteristicPath& partial() const { return partial_; }

 private:
  CharacteristicPath partial_;
};

/// Classical RK4 for dX/dt = V(w(t, X)) from (s, xi) to t_end, one step per
/// snapshot interval. w is linear in x between its samples and linear in t
/// between snapshots. t_end < s traces backwards.
CharacteristicPath trace(const Trajectory& traj, double s, double xi, double t_end);

/// Speed V(w(t, x)) seen by a characteristic.
double characteristic_speed(const Trajectory& traj, double t, double x);

/// Integral of u(t, .) between the two paths, with partial end cells.
/// u is linear in t between snapshots. Throws PathOrderError if the paths
/// are crossed at t.
double mass_between(const Trajectory& traj, const CharacteristicPath& lower,
                    const CharacteristicPath& upper, double t);

/// Integral of the piecewise-constant profile over [a, b], boundary states
/// outside the grid.
double cell_integral(const Profile& p, double a, double b);

/// Snapshot-interpolated field value at (t, x); `field` picks u or w.
enum class Field { kU, kW };
double field_at(const Trajectory& traj, Field field, double t, double x);

}  // namespace nlt
