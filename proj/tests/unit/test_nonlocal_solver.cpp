#include <doctest.h>

#include <cmath>
#include <random>

#include "nlt/diagnostics.hpp"
#include "nlt/errors.hpp"
#include "nlt/nonlocal_solver.hpp"
#include "nlt/scenarios.hpp"
#include "support.hpp"

using namespace nlt;
using nlt::testing::grid;

namespace {

NonlocalRunConfig config(const Grid1D& g, const KernelSpec& k, double eps, double T) {
  return NonlocalRunConfig{g, k, eps, VelocityModel::greenshields(), T, 0.5, {}};
}

Profile step_datum(const Grid1D& shape) {
  Grid1D g = shape;
  g.boundary_left = 0.0;
  g.boundary_right = 1.0;
  return sample_cell_averages(g, unit_step());
}

}  // namespace

TEST_CASE("cfl_dt: arithmetic") {
  auto cfg = config(grid(0.0, 0.01, 100), KernelSpec::exponential(), 0.1, 1.0);
  CHECK(cfl_dt(cfg) == doctest::Approx(0.005));

  cfg.grid = grid(0.0, 0.02, 100);
  cfg.cfl = 0.4;
  cfg.velocity = VelocityModel::custom(
      "fast", [](double w) { return 2.0 * (1.0 - w); }, [](double) { return -2.0; });
  CHECK(cfl_dt(cfg) == doctest::Approx(0.004));

  // V = 0 hits the floor and is clamped to t_end
  cfg.velocity = VelocityModel::custom(
      "still", [](double) { return 0.0; }, [](double) { return 0.0; });
  cfg.t_end = 0.7;
  CHECK(cfl_dt(cfg) == 0.7);
}

TEST_CASE("step: full jam and empty road are stationary") {
  const auto dk = discretize(KernelSpec::exponential(), 0.1, 0.01);
  const auto vm = VelocityModel::greenshields();
  for (double c : {0.0, 1.0}) {
    const auto u = Profile::constant(grid(0.0, 0.01, 100, c, c), c);
    const auto v = step(u, dk, vm, 0.004);
    for (std::size_t j = 0; j < v.size(); ++j) CHECK(v[j] == c);
  }
}

TEST_CASE("step: time step above the stability limit") {
  const auto dk = discretize(KernelSpec::exponential(), 0.1, 0.01);
  const auto u = Profile::constant(grid(0.0, 0.01, 100), 0.5);
  CHECK_THROWS_AS(step(u, dk, VelocityModel::greenshields(), 0.02), StabilityError);
}

TEST_CASE("solve: t_end = 0 gives one snapshot equal to u0") {
  std::mt19937_64 rng(4);
  const auto u0 = nlt::testing::random_profile(rng, grid(-1.0, 0.01, 200));
  const auto traj = solve(config(u0.grid(), KernelSpec::exponential(), 0.1, 0.0), u0);
  REQUIRE(traj.snapshots.size() == 1);
  CHECK(traj.snapshots[0].t == 0.0);
  CHECK(l1_distance(traj.snapshots[0].u, u0) == 0.0);
}

TEST_CASE("solve: unit step keeps u = 1 on x > 0") {
  const double eps = 0.25, dx = eps / 16.0;
  const auto u0 = step_datum(Grid1D::covering(-2.0, 1.0, dx));
  for (const auto& k : {KernelSpec::uniform(), KernelSpec::exponential()}) {
    auto cfg = config(u0.grid(), k, eps, 1.0);
    cfg.snapshot_times = uniform_times(1.0, 20);
    const auto traj = solve(cfg, u0);
    for (const auto& s : traj.snapshots) {
      for (std::size_t j = 0; j < s.u.size(); ++j) {
        if (s.u.grid().center(static_cast<std::ptrdiff_t>(j)) > 0.0) CHECK(s.u[j] == 1.0);
      }
    }
  }
}

TEST_CASE("solve: snapshots hit requested times and carry convolve(u)") {
  std::mt19937_64 rng(8);
  const double dx = 0.01;
  const auto u0 = nlt::testing::random_profile(rng, grid(-1.0, dx, 300));
  auto cfg = config(u0.grid(), KernelSpec::triangle(), 0.1, 0.37);
  cfg.snapshot_times = {0.0, 0.1, 0.123, 0.37};
  const auto traj = solve(cfg, u0);
  REQUIRE(traj.snapshots.size() == 4);
  const auto dk = discretize(cfg.kernel, cfg.epsilon, dx);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(traj.snapshots[k].t == cfg.snapshot_times[k]);
    const auto w = convolve(traj.snapshots[k].u, dk);
    for (std::size_t j = 0; j < w.size(); ++j) CHECK(traj.snapshots[k].w[j] == w[j]);
  }
  for (const auto& s : traj.steps) CHECK(s.dt <= cfl_dt(cfg) * (1 + 1e-12));
}

TEST_CASE("property: maximum principle, w bounds and mass ledger on random data") {
  std::mt19937_64 rng(12);
  for (int rep = 0; rep < 6; ++rep) {
    const auto u0 = nlt::testing::random_profile(rng, grid(-1.0, 0.01, 250));
    for (const auto& k : {KernelSpec::exponential(), KernelSpec::uniform()}) {
      auto cfg = config(u0.grid(), k, 0.1, 0.5);
      cfg.enforce_bounds = false;
      const auto traj = solve(cfg, u0);
      for (const auto& s : traj.steps) {
        CHECK(s.min_u >= -kBoundsTol);
        CHECK(s.max_u <= 1.0 + kBoundsTol);
        CHECK(s.min_w >= -kBoundsTol);
        CHECK(s.max_w <= 1.0 + kBoundsTol);
      }
      CHECK(std::abs(traj.mass_ledger_residual()) <= 1e-12);
    }
  }
}

TEST_CASE("property: mass constant with stationary boundary states") {
  // equal boundary fluxes: 0 | 1 has f = 0 on both sides
  const double dx = 0.01;
  std::mt19937_64 rng(30);
  auto u0 = nlt::testing::random_profile(rng, grid(-1.0, dx, 300));
  Grid1D g = u0.grid();
  g.boundary_left = 0.0;
  g.boundary_right = 1.0;
  u0 = Profile(g, std::vector<double>(u0.values().begin(), u0.values().end()));
  const auto traj = solve(config(g, KernelSpec::exponential(), 0.1, 1.0), u0);
  CHECK(traj.mass_drift_rate() <= 1e-10);
}

TEST_CASE("property: monotone data under a convex kernel keeps TV(w) flat") {
  const double eps = 0.1, dx = eps / 32.0;
  DatumSpec ds;
  ds.kind = DatumKind::kMonotoneRamp;
  ds.u_left = 0.0;
  ds.u_right = 1.0;
  ds.x0 = -0.5;
  ds.x1 = 0.5;
  const auto d = standard_datum(ds, Grid1D::covering(-2.0, 1.5, dx));
  for (const auto& k : {KernelSpec::exponential(), KernelSpec::triangle()}) {
    auto cfg = config(d.u0.grid(), k, eps, 0.5);
    cfg.snapshot_times = uniform_times(0.5, 10);
    const auto s = tv_series(solve(cfg, d.u0));
    for (std::size_t i = 0; i < s.times.size(); ++i) {
      CHECK(s.negative_part[i] <= 1e-13);
      CHECK(s.tv_w[i] == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: slope of w stays below eta(0-)/eps plus slack") {
  std::mt19937_64 rng(13);
  const double eps = 0.1, dx = 0.005;
  const auto u0 = nlt::testing::random_profile(rng, grid(-1.0, dx, 400));
  auto cfg = config(u0.grid(), KernelSpec::exponential(), eps, 0.5);
  cfg.snapshot_times = uniform_times(0.5, 5);
  for (const auto& s : solve(cfg, u0).snapshots) {
    double slope = 0.0;
    for (std::size_t j = 0; j + 1 < s.w.size(); ++j) slope = std::max(slope, std::abs(s.w[j + 1] - s.w[j]) / dx);
    CHECK(slope <= 1.0 / eps + 10.0 * dx / (eps * eps));
  }
}

TEST_CASE("property: self-convergence under grid halving, order >= 0.8") {
  const double eps = 0.2, T = 0.3;
  const auto smooth = [](double x) { return 0.5 + 0.3 * std::sin(M_PI * x) * std::exp(-x * x); };
  std::vector<Profile> sols;
  for (int r : {16, 32, 64}) {
    const double dx = eps / r;
    const auto g = grid(-3.0, dx, static_cast<std::size_t>(std::lround(6.0 / dx)), 0.5, 0.5);
    std::vector<double> v(g.n_cells);
    for (std::size_t j = 0; j < v.size(); ++j) {
      // 4-point Gauss would be overkill; Simpson on each cell is exact enough here
      const double a = g.node(static_cast<std::ptrdiff_t>(j)), b = a + dx;
      v[j] = (smooth(a) + 4.0 * smooth(0.5 * (a + b)) + smooth(b)) / 6.0;
    }
    sols.push_back(solve(config(g, KernelSpec::exponential(), eps, T), Profile(g, v)).snapshots.back().u);
  }
  const auto restrict2 = [](const Profile& fine, const Profile& coarse) {
    std::vector<double> v(coarse.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = 0.5 * (fine[2 * j] + fine[2 * j + 1]);
    return Profile(coarse.grid(), v);
  };
  const double e1 = l1_distance(restrict2(sols[1], sols[0]), sols[0]);
  const double e2 = l1_distance(restrict2(sols[2], sols[1]), sols[1]);
  CHECK(std::log2(e1 / e2) >= 0.8);
}

TEST_CASE("solve: single block at eps = 4 ell grows TV(w)") {
  const double ell = 0.25, eps = 1.0, dx = 1.0 / 128.0;
  auto spec = default_counterexample(eps, 1);
  spec.h_seq = {1.0};
  const auto u0 = counterexample_datum(spec, Grid1D::covering(-4.0, 1.0, dx));
  auto cfg = config(u0.grid(), KernelSpec::uniform(), 4.0 * ell, 0.02);
  cfg.snapshot_times = uniform_times(0.02, 20);
  const auto s = tv_series(solve(cfg, u0));
  CHECK(s.tv_w.front() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(initial_growth_rate(s, 0.02) >= 0.4);
}

TEST_CASE("solve: negative speeds take the fallback with a warning") {
  auto cfg = config(grid(-1.0, 0.01, 200, 0.5, 0.5), KernelSpec::exponential(), 0.1, 0.1);
  cfg.velocity = VelocityModel::custom(
      "signed", [](double w) { return 0.5 - w; }, [](double) { return -1.0; });
  const auto traj = solve(cfg, Profile::constant(cfg.grid, 0.5));
  CHECK(traj.echo.scheme == "lax_friedrichs");
  REQUIRE(traj.warnings.size() == 1);
}

TEST_CASE("solve: input errors") {
  const auto g = grid(0.0, 0.01, 100);
  auto cfg = config(g, KernelSpec::exponential(), 0.1, 0.1);
  CHECK_THROWS_AS(solve(cfg, Profile::constant(g, 1.5)), DomainError);
  CHECK_THROWS_AS(solve(cfg, Profile::constant(grid(0.0, 0.02, 100), 0.5)), GridError);
  cfg.epsilon = 0.05;
  CHECK_THROWS_AS(solve(cfg, Profile::constant(g, 0.5)), ResolutionError);
}

TEST_CASE("domain_margin: travel plus window") {
  CHECK(domain_margin(2.0, 1.0, 0.5) == 2.5);
}
