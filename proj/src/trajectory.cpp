#include "nlt/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "march.hpp"
#include "nlt/errors.hpp"

namespace nlt {

double Trajectory::max_snapshot_spacing() const {
  double s = 0.0;
  for (std::size_t i = 1; i < snapshots.size(); ++i) {
    s = std::max(s, snapshots[i].t - snapshots[i - 1].t);
  }
  return s;
}

double Trajectory::final_mass() const {
  return steps.empty() ? initial_mass : steps.back().mass;
}

double Trajectory::mass_drift_rate() const {
  const double T = t_last();
  return T > 0.0 ? std::abs(final_mass() - initial_mass) / T : 0.0;
}

double Trajectory::mass_ledger_residual() const {
  return std::abs(final_mass() - initial_mass - (inflow - outflow));
}

std::size_t Trajectory::snapshot_before(double t) const {
  auto it = std::upper_bound(snapshots.begin(), snapshots.end(), t,
                             [](double x, const Snapshot& s) { return x < s.t; });
  if (it == snapshots.begin()) return 0;
  return static_cast<std::size_t>(it - snapshots.begin()) - 1;
}

std::vector<double> uniform_times(double t_end, std::size_t count) {
  if (count == 0) return {0.0};
  std::vector<double> t(count + 1);
  for (std::size_t i = 0; i <= count; ++i) {
    t[i] = t_end * static_cast<double>(i) / static_cast<double>(count);
  }
  t.back() = t_end;
  return t;
}

namespace detail {

std::vector<double> snapshot_schedule(std::vector<double> times, double t_end) {
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw SnapshotError("t_end must be >= 0");
  if (times.empty()) times = {0.0, t_end};
  for (double t : times) {
    if (!(t >= 0.0 && t <= t_end * (1.0 + 1e-12))) {
      throw SnapshotError("snapshot time " + std::to_string(t) + " outside [0, t_end]");
    }
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  for (double& t : times) t = std::min(t, t_end);
  return times;
}

void march(double t_end, double dt_max, const std::vector<double>& schedule,
           const std::function<void(double)>& advance,
           const std::function<void(double)>& emit) {
  std::size_t next = 0;
  double t = 0.0;
  while (next < schedule.size() && schedule[next] <= 0.0) emit(schedule[next++]);
  while (t < t_end) {
    const double target = next < schedule.size() ? schedule[next] : t_end;
    double dt = std::min(dt_max, target - t);
    bool hit = dt == target - t;
    // Avoid a sliver step in front of a target.
    if (!hit && target - t - dt < 1e-9 * dt_max) {
      dt = target - t;
      hit = true;
    }
    advance(dt);
    t = hit ? target : t + dt;
    while (next < schedule.size() && schedule[next] <= t) emit(schedule[next++]);
  }
}

}  // namespace detail
}  // namespace nlt
