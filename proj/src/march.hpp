#pragma once

#include <functional>
#include <vector>

namespace nlt::detail {

/// Sorted, de-duplicated snapshot schedule inside [0, t_end]; defaults to
/// {0, t_end}. Throws SnapshotError on out-of-range times.
std::vector<double> snapshot_schedule(std::vector<double> times, double t_end);

/// Advances from t = 0 to t_end in steps of at most dt_max, shortening the
/// step that would overshoot a snapshot time so that every snapshot is hit
/// exactly. `emit(t)` is called at each snapshot time, `advance(dt)` for each
/// step.
void march(double t_end, double dt_max, const std::vector<double>& schedule,
           const std::function<void(double)>& advance,
           const std::function<void(double)>& emit);

}  // namespace nlt::detail
