#include "nlt/characteristics.hpp"

#include <algorithm>
#include <cmath>

namespace nlt {

namespace {

constexpr double kTimeTol = 1e-12;

// Snapshot interval [k, k+1] containing t and the weight of snapshot k+1.
std::pair<std::size_t, double> bracket(const Trajectory& traj, double t) {
  const auto& snaps = traj.snapshots;
  if (snaps.size() == 1) return {0, 0.0};
  const auto it = std::upper_bound(snaps.begin(), snaps.end(), t,
                                   [](double v, const Snapshot& s) { return v < s.t; });
  std::size_t k = it == snaps.begin() ? 0 : static_cast<std::size_t>(it - snaps.begin()) - 1;
  k = std::min(k, snaps.size() - 2);
  const double span = snaps[k + 1].t - snaps[k].t;
  const double theta = span > 0.0 ? std::clamp((t - snaps[k].t) / span, 0.0, 1.0) : 0.0;
  return {k, theta};
}

double cell_value(const Profile& p, double x) {
  const Grid1D& g = p.grid();
  const auto j = static_cast<std::ptrdiff_t>(std::floor((x - g.x_left) / g.cell_width));
  return p.extended(j);
}

void require_span(const Trajectory& traj, double t) {
  if (traj.snapshots.empty()) throw SnapshotError("trajectory has no snapshots");
  if (t < traj.t_first() - kTimeTol || t > traj.t_last() + kTimeTol) {
    throw SnapshotError("time " + std::to_string(t) + " outside the trajectory span");
  }
}

}  // namespace

double CharacteristicPath::at(double t) const {
  if (samples.empty()) throw SnapshotError("empty characteristic path");
  const bool forward = samples.back().t >= samples.front().t;
  if (t < t_min() - kTimeTol || t > t_max() + kTimeTol) {
    throw SnapshotError("time " + std::to_string(t) + " outside the traced range");
  }
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    const auto& a = samples[i];
    const auto& b = samples[i + 1];
    const double lo = forward ? a.t : b.t;
    const double hi = forward ? b.t : a.t;
    if (t >= lo - kTimeTol && t <= hi + kTimeTol) {
      const double span = b.t - a.t;
      if (span == 0.0) return a.x;
      const double theta = std::clamp((t - a.t) / span, 0.0, 1.0);
      return (1.0 - theta) * a.x + theta * b.x;
    }
  }
  return samples.back().x;
}

double CharacteristicPath::t_min() const {
  return std::min(samples.front().t, samples.back().t);
}

double CharacteristicPath::t_max() const {
  return std::max(samples.front().t, samples.back().t);
}

double field_at(const Trajectory& traj, Field field, double t, double x) {
  require_span(traj, t);
  const auto [k, theta] = bracket(traj, t);
  const auto value = [&](const Snapshot& s) {
    return field == Field::kW ? s.w.interpolate(x, traj.w_anchor) : cell_value(s.u, x);
  };
  const double a = value(traj.snapshots[k]);
  if (theta == 0.0) return a;
  return (1.0 - theta) * a + theta * value(traj.snapshots[k + 1]);
}

double characteristic_speed(const Trajectory& traj, double t, double x) {
  return traj.velocity.V(field_at(traj, Field::kW, t, x));
}

CharacteristicPath trace(const Trajectory& traj, double s, double xi, double t_end) {
  require_span(traj, s);
  require_span(traj, t_end);
  if (traj.snapshots.size() > 1 &&
      traj.max_snapshot_spacing() > 5.0 * traj.echo.dt_cfl * (1.0 + 1e-9)) {
    throw SnapshotError("snapshots too sparse for tracing: spacing " +
                        std::to_string(traj.max_snapshot_spacing()) + " exceeds 5 dt");
  }
  const Grid1D& g = traj.grid();
  if (xi < g.x_left || xi > g.x_right()) throw DomainError("start point outside the grid");

  CharacteristicPath path;
  path.s = s;
  path.xi = xi;
  path.samples.push_back({s, xi});

  std::vector<double> stops;
  for (const auto& snap : traj.snapshots) {
    const bool between = t_end >= s ? (snap.t > s + kTimeTol && snap.t < t_end - kTimeTol)
                                    : (snap.t < s - kTimeTol && snap.t > t_end + kTimeTol);
    if (between) stops.push_back(snap.t);
  }
  if (t_end < s) std::reverse(stops.begin(), stops.end());
  if (std::abs(t_end - s) > kTimeTol) stops.push_back(t_end);

  // Stage times sit inside one snapshot interval, so the clamp in bracket()
  // never mixes neighbouring intervals.
  const auto f = [&](double t, double x) {
    return characteristic_speed(traj, std::clamp(t, traj.t_first(), traj.t_last()), x);
  };
  double t = s;
  double x = xi;
  for (double t_next : stops) {
    const double h = t_next - t;
    const double k1 = f(t, x);
    const double k2 = f(t + 0.5 * h, x + 0.5 * h * k1);
    const double k3 = f(t + 0.5 * h, x + 0.5 * h * k2);
    const double k4 = f(t_next, x + h * k3);
    x += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    t = t_next;
    if (x < g.x_left || x > g.x_right()) {
      throw DomainExit("characteristic left the grid at t = " + std::to_string(t), path);
    }
    path.samples.push_back({t, x});
  }
  return path;
}

double cell_integral(const Profile& p, double a, double b) {
  if (b <= a) return 0.0;
  const Grid1D& g = p.grid();
  const double h = g.cell_width;
  const auto j_lo = static_cast<std::ptrdiff_t>(std::floor((a - g.x_left) / h));
  const auto j_hi = static_cast<std::ptrdiff_t>(std::floor((b - g.x_left) / h));
  if (j_lo == j_hi) return p.extended(j_lo) * (b - a);
  double total = p.extended(j_lo) * (g.node(j_lo + 1) - a);
  for (std::ptrdiff_t j = j_lo + 1; j < j_hi; ++j) total += p.extended(j) * h;
  total += p.extended(j_hi) * (b - g.node(j_hi));
  return total;
}

double mass_between(const Trajectory& traj, const CharacteristicPath& lower,
                    const CharacteristicPath& upper, double t) {
  require_span(traj, t);
  const double a = lower.at(t);
  const double b = upper.at(t);
  if (a > b + 1e-12) {
    throw PathOrderError("paths are crossed at t = " + std::to_string(t));
  }
  const auto [k, theta] = bracket(traj, t);
  const double m0 = cell_integral(traj.snapshots[k].u, a, b);
  if (theta == 0.0) return m0;
  return (1.0 - theta) * m0 + theta * cell_integral(traj.snapshots[k + 1].u, a, b);
}

}  // namespace nlt
