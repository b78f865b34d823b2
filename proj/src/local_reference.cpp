#include "nlt/local_reference.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "march.hpp"
#include "nlt/errors.hpp"
#include "nlt/nonlocal_solver.hpp"

namespace nlt {

namespace {

double greenshields_godunov(double a, double b) {
  const auto f = [](double u) { return u * (1.0 - u); };
  if (a <= b) return std::min(f(a), f(b));
  if (b <= 0.5 && 0.5 <= a) return 0.25;
  return std::max(f(a), f(b));
}

// Engquist-Osher flux f(0) + int_0^a (f')^+ + int_0^b (f')^-, with the
// positive/negative variations of f tabulated on a fine lattice. Inside a
// lattice cell f is taken monotone, which keeps F(u, u) = f(u) exactly.
class EngquistOsher {
 public:
  explicit EngquistOsher(const VelocityModel& vm) : vm_(vm) {
    pos_.assign(kN + 1, 0.0);
    neg_.assign(kN + 1, 0.0);
    for (int i = 0; i < kN; ++i) {
      const double d = f(node(i + 1)) - f(node(i));
      pos_[i + 1] = pos_[i] + std::max(0.0, d);
      neg_[i + 1] = neg_[i] + std::min(0.0, d);
    }
  }

  double operator()(double a, double b) const { return f(0.0) + up(a) + down(b); }

 private:
  static constexpr int kN = 4096;
  static double node(int i) { return static_cast<double>(i) / kN; }
  double f(double u) const { return u * vm_.V(u); }
  int cell(double u) const { return std::clamp(static_cast<int>(u * kN), 0, kN - 1); }
  double up(double a) const {
    const int i = cell(a);
    return pos_[i] + std::max(0.0, f(a) - f(node(i)));
  }
  double down(double b) const {
    const int i = cell(b);
    return neg_[i] + std::min(0.0, f(b) - f(node(i)));
  }

  const VelocityModel& vm_;
  std::vector<double> pos_, neg_;
};

template <class Flux>
std::vector<double> interface_fluxes(const Profile& u, const Flux& F) {
  const std::size_t n = u.size();
  std::vector<double> out(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const auto ii = static_cast<std::ptrdiff_t>(i);
    out[i] = F(u.extended(ii - 1), u.extended(ii));
  }
  return out;
}

std::vector<double> fluxes_for(const Profile& u, const VelocityModel& vm) {
  if (vm.family() == VelocityFamily::kGreenshields) {
    return interface_fluxes(u, greenshields_godunov);
  }
  EngquistOsher eo(vm);
  return interface_fluxes(u, eo);
}

double flux_pair(const VelocityModel& vm, double a, double b) {
  if (vm.family() == VelocityFamily::kGreenshields) return greenshields_godunov(a, b);
  return EngquistOsher(vm)(a, b);
}

}  // namespace

double godunov_flux(const VelocityModel& vm, double u_left, double u_right) {
  return flux_pair(vm, u_left, u_right);
}

double local_cfl_dt(const LocalRunConfig& cfg) {
  const double dt =
      cfg.cfl * cfg.grid.cell_width / std::max(cfg.velocity.max_abs_flux_slope(), kSpeedFloor);
  return cfg.t_end > 0.0 ? std::min(dt, cfg.t_end) : dt;
}

namespace {

struct LocalStep {
  std::vector<double> u;
  double flux_in, flux_out;
};

LocalStep local_step_raw(const Profile& u, const VelocityModel& vm, double dt) {
  const double lambda = dt / u.grid().cell_width;
  if (!(dt >= 0.0) || lambda * vm.max_abs_flux_slope() > 1.0 + 1e-12) {
    throw StabilityError("local step violates the CFL condition");
  }
  const auto F = fluxes_for(u, vm);
  LocalStep s;
  s.u.resize(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) s.u[j] = u[j] - lambda * (F[j + 1] - F[j]);
  s.flux_in = F.front();
  s.flux_out = F.back();
  return s;
}

}  // namespace

Profile local_step(const Profile& u, const VelocityModel& vm, double dt) {
  return Profile(u.grid(), local_step_raw(u, vm, dt).u);
}

Trajectory solve_local(const LocalRunConfig& cfg, const Profile& u0) {
  if (!u0.grid().same_geometry(cfg.grid)) throw GridError("solve_local: u0 is not on cfg.grid");
  if (!(cfg.cfl > 0.0 && cfg.cfl <= 1.0)) throw StabilityError("cfl must lie in (0, 1]");
  if (u0.min() < -kBoundsTol || u0.max() > 1.0 + kBoundsTol) {
    throw DomainError("initial datum must take values in [0, 1]");
  }
  const auto schedule = detail::snapshot_schedule(cfg.snapshot_times, cfg.t_end);
  const double dt_max = local_cfl_dt(cfg);

  RunEcho echo;
  echo.kind = "local";
  echo.scheme = cfg.velocity.family() == VelocityFamily::kGreenshields ? "godunov"
                                                                       : "engquist_osher";
  echo.velocity = cfg.velocity.name();
  echo.cell_width = cfg.grid.cell_width;
  echo.dt_cfl = dt_max;
  echo.cfl = cfg.cfl;
  echo.t_end = cfg.t_end;

  Trajectory traj(echo, cfg.velocity, Anchor::kCenters);
  traj.initial_mass = u0.mass();
  Profile u = u0;

  const auto advance = [&](double dt) {
    LocalStep s = local_step_raw(u, cfg.velocity, dt);
    const auto [lo, hi] = std::minmax_element(s.u.begin(), s.u.end());
    for (double v : s.u) {
      if (!std::isfinite(v)) throw NumericalBlowup("non-finite density after a step");
    }
    if (cfg.enforce_bounds && (*lo < -kBoundsTol || *hi > 1.0 + kBoundsTol)) {
      throw BoundsViolation("local scheme left [0, 1]");
    }
    const double umin = *lo, umax = *hi;
    traj.inflow += dt * s.flux_in;
    traj.outflow += dt * s.flux_out;
    u = Profile(u.grid(), std::move(s.u));
    traj.steps.push_back({dt, u.mass(), umin, umax, umin, umax});
  };
  const auto emit = [&](double t) { traj.snapshots.push_back({t, u, u}); };
  detail::march(cfg.t_end, dt_max, schedule, advance, emit);
  return traj;
}

double exact_riemann(const VelocityModel& vm, double u_left, double u_right, double t,
                     double x) {
  if (vm.family() != VelocityFamily::kGreenshields) {
    throw UnsupportedModel("exact_riemann is available for Greenshields only");
  }
  if (u_left == u_right) return u_left;
  if (t <= 0.0) return x < 0.0 ? u_left : u_right;
  const double xi = x / t;
  if (u_left < u_right) {
    // Shock with Rankine-Hugoniot speed (f(uR) - f(uL)) / (uR - uL).
    const double s = 1.0 - u_left - u_right;
    return xi < s ? u_left : u_right;
  }
  // Rarefaction fan of the concave flux, f'(u) = 1 - 2u.
  if (xi <= 1.0 - 2.0 * u_left) return u_left;
  if (xi >= 1.0 - 2.0 * u_right) return u_right;
  return 0.5 * (1.0 - xi);
}

double cell_entropy_violation(const Profile& before, const Profile& after,
                              const VelocityModel& vm, double dt, double c) {
  const double lambda = dt / before.grid().cell_width;
  const std::size_t n = before.size();
  std::vector<double> G(n + 1);
  // one flux table for the whole sweep
  std::optional<EngquistOsher> eo;
  if (vm.family() != VelocityFamily::kGreenshields) eo.emplace(vm);
  const auto F = [&](double a, double b) { return eo ? (*eo)(a, b) : greenshields_godunov(a, b); };
  for (std::size_t i = 0; i <= n; ++i) {
    const auto ii = static_cast<std::ptrdiff_t>(i);
    const double a = before.extended(ii - 1);
    const double b = before.extended(ii);
    G[i] = F(std::max(a, c), std::max(b, c)) - F(std::min(a, c), std::min(b, c));
  }
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    const double lhs =
        std::abs(after[j] - c) - std::abs(before[j] - c) + lambda * (G[j + 1] - G[j]);
    worst = std::max(worst, lhs);
  }
  return worst;
}

}  // namespace nlt
