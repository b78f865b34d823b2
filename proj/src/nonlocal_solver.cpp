#include "nlt/nonlocal_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "march.hpp"
#include "nlt/errors.hpp"

namespace nlt {

double cfl_dt(const NonlocalRunConfig& cfg) {
  // the fallback flux moves information at up to max|V| + Lip(V)
  const auto& vm = cfg.velocity;
  const double speed = vm.nonnegative() ? vm.max_abs_V() : vm.max_abs_V() + vm.lip_const();
  const double dt = cfg.cfl * cfg.grid.cell_width / std::max(speed, kSpeedFloor);
  return cfg.t_end > 0.0 ? std::min(dt, cfg.t_end) : dt;
}

StepOutput step_raw(const Profile& u, const DiscreteKernel& dk, const VelocityModel& vm,
                    double dt) {
  const Grid1D& g = u.grid();
  const std::size_t n = u.size();
  const double lambda = dt / g.cell_width;
  const bool fallback = !vm.nonnegative();

  // Monotonicity limit of the scheme: the upwind update is a convex
  // combination when lambda (max|V| + gamma_0 Lip(V)) <= 1.
  const double gamma0 = dk.weights().front();
  const double speed = fallback ? vm.max_abs_V() + vm.lip_const()
                                : vm.max_abs_V() + gamma0 * vm.lip_const();
  if (!(dt >= 0.0) || lambda * speed > 1.0 + 1e-12) {
    throw StabilityError("time step " + std::to_string(dt) +
                         " violates the CFL limit dx / " + std::to_string(speed));
  }

  StepOutput out;
  out.fallback = fallback;
  out.w = convolve_nodes(u, dk, n + 1);

  // F[i] is the numerical flux through node i (left edge of cell i).
  std::vector<double> F(n + 1);
  if (!fallback) {
    for (std::size_t i = 0; i <= n; ++i) {
      F[i] = vm.V(out.w[i]) * u.extended(static_cast<std::ptrdiff_t>(i) - 1);
    }
  } else {
    const double alpha = vm.max_abs_V() + vm.lip_const();
    for (std::size_t i = 0; i <= n; ++i) {
      const auto ii = static_cast<std::ptrdiff_t>(i);
      const double ul = u.extended(ii - 1);
      const double ur = u.extended(ii);
      F[i] = 0.5 * (ul + ur) * vm.V(out.w[i]) - 0.5 * alpha * (ur - ul);
    }
  }

  const auto vals = u.values();
  out.u.resize(n);
  for (std::size_t j = 0; j < n; ++j) out.u[j] = vals[j] - lambda * (F[j + 1] - F[j]);
  out.flux_in = F.front();
  out.flux_out = F.back();
  return out;
}

Profile step(const Profile& u, const DiscreteKernel& dk, const VelocityModel& vm, double dt) {
  return Profile(u.grid(), step_raw(u, dk, vm, dt).u);
}

namespace {

void check_state(const Profile& u0) {
  if (u0.min() < -kBoundsTol || u0.max() > 1.0 + kBoundsTol) {
    throw DomainError("initial datum must take values in [0, 1]");
  }
}

}  // namespace

Trajectory solve(const NonlocalRunConfig& cfg, const Profile& u0) {
  if (!u0.grid().same_geometry(cfg.grid)) throw GridError("solve: u0 is not on cfg.grid");
  if (!(cfg.cfl > 0.0 && cfg.cfl <= 1.0)) throw StabilityError("cfl must lie in (0, 1]");
  check_state(u0);
  const auto schedule = detail::snapshot_schedule(cfg.snapshot_times, cfg.t_end);
  const DiscreteKernel dk = discretize(cfg.kernel, cfg.epsilon, cfg.grid.cell_width,
                                       cfg.tail_tol, cfg.min_cells_per_eps);
  const double dt_max = cfl_dt(cfg);

  RunEcho echo;
  echo.kind = "nonlocal";
  echo.scheme = cfg.velocity.nonnegative() ? "upwind" : "lax_friedrichs";
  echo.kernel = cfg.kernel.name();
  echo.velocity = cfg.velocity.name();
  echo.epsilon = cfg.epsilon;
  echo.cell_width = cfg.grid.cell_width;
  echo.dt_cfl = dt_max;
  echo.cfl = cfg.cfl;
  echo.t_end = cfg.t_end;
  echo.kernel_cells = dk.size();

  Trajectory traj(echo, cfg.velocity, Anchor::kNodes);
  traj.initial_mass = u0.mass();
  if (!cfg.velocity.nonnegative()) {
    traj.warnings.push_back("V takes negative values on [0, 1]; using the Lax-Friedrichs fallback");
  }

  Profile u = u0;
  const auto within = [&](double lo, double hi) {
    return lo >= -kBoundsTol && hi <= 1.0 + kBoundsTol;
  };

  const auto advance = [&](double dt) {
    StepOutput s = step_raw(u, dk, cfg.velocity, dt);
    const auto [wmin, wmax] = std::minmax_element(s.w.begin(), s.w.end());
    const auto [umin, umax] = std::minmax_element(s.u.begin(), s.u.end());
    for (double v : s.u) {
      if (!std::isfinite(v)) throw NumericalBlowup("non-finite density after a step");
    }
    if (cfg.enforce_bounds && !(within(*umin, *umax) && within(*wmin, *wmax))) {
      throw BoundsViolation("maximum principle violated: u in [" + std::to_string(*umin) + ", " +
                            std::to_string(*umax) + "], w in [" + std::to_string(*wmin) +
                            ", " + std::to_string(*wmax) + "]");
    }
    traj.inflow += dt * s.flux_in;
    traj.outflow += dt * s.flux_out;
    u = Profile(u.grid(), std::move(s.u));
    traj.steps.push_back({dt, u.mass(), *umin, *umax, *wmin, *wmax});
  };
  const auto emit = [&](double t) { traj.snapshots.push_back({t, u, convolve(u, dk)}); };

  detail::march(cfg.t_end, dt_max, schedule, advance, emit);
  return traj;
}

double domain_margin(double t_end, double max_speed, double window_length) {
  return t_end * max_speed + window_length;
}

}  // namespace nlt
