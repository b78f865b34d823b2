#include <doctest.h>

#include <cmath>
#include <random>

#include "nlt/errors.hpp"
#include "nlt/grid.hpp"
#include "nlt/kernel.hpp"
#include "support.hpp"

using namespace nlt;
using nlt::testing::grid;
using nlt::testing::random_profile;

namespace {

Profile step_at(const Grid1D& shape, double x0) {
  Grid1D g = shape;
  g.boundary_left = 0.0;
  g.boundary_right = 1.0;
  return sample_cell_averages(g, PiecewiseConstant{{{x0, INFINITY, 1.0}}});
}

}  // namespace

TEST_CASE("Grid1D: covering and validation") {
  const auto g = Grid1D::covering(-1.0, 1.0, 0.25);
  CHECK(g.n_cells == 8);
  CHECK(g.x_right() == 1.0);
  CHECK(Grid1D::covering(0.0, 1.01, 0.25).n_cells == 5);
  CHECK_THROWS_AS(Grid1D::covering(0.0, 1.0, 0.0), GridError);
  CHECK_THROWS_AS(grid(0.0, 0.1, 1).validate(), GridError);
  CHECK_THROWS_AS(Profile(grid(0.0, 0.1, 3), {0.0, 1.0}), GridError);
  CHECK_THROWS_AS(Profile(grid(0.0, 0.1, 2), {0.0, NAN}), NumericalBlowup);
}

TEST_CASE("total_variation: constant, step, boundaries") {
  CHECK(total_variation(Profile::constant(grid(0.0, 0.1, 10, 0.5, 0.5), 0.5)) == 0.0);
  CHECK(total_variation(step_at(grid(-1.0, 0.1, 20), 0.0)) == doctest::Approx(1.0).epsilon(1e-14));
  // boundary jumps count
  CHECK(total_variation(Profile(grid(0.0, 0.1, 10, 0.0, 1.0), std::vector<double>(10, 0.5))) == doctest::Approx(1.0));
}

TEST_CASE("sample_cell_averages: partial cells get exact overlap") {
  const auto g = grid(0.0, 0.25, 4);
  const auto p = sample_cell_averages(g, PiecewiseConstant{{{0.1, 0.6, 1.0}}});
  CHECK(p[0] == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p[2] == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(p[3] == 0.0);
}

TEST_CASE("tv_decomposition: monotone profile has no negative part") {
  std::vector<double> v(50);
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = static_cast<double>(j) / 50.0;
  const auto d = tv_decomposition(Profile(grid(0.0, 0.02, 50, 0.0, 1.0), v));
  CHECK(d.negative_part == 0.0);
  CHECK(d.jump_across == 1.0);
}

TEST_CASE("property: TV = jump_across + 2 negative_part") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 200; ++rep) {
    const auto p = random_profile(rng, grid(0.0, 0.1, 2 + rep % 40));
    const auto d = tv_decomposition(p);
    // brute force
    double tv = 0.0;
    for (std::ptrdiff_t j = -1; j < static_cast<std::ptrdiff_t>(p.size()); ++j) {
      tv += std::abs(p.extended(j + 1) - p.extended(j));
    }
    CHECK(total_variation(p) == doctest::Approx(tv).epsilon(1e-13));
    CHECK(d.jump_across + 2.0 * d.negative_part == doctest::Approx(tv).epsilon(1e-13));
  }
}

TEST_CASE("property: TV invariant under translation and refinement") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    PiecewiseConstant f;
    for (int k = 0; k < 6; ++k) {
      const double a = -1.0 + 0.25 * k;
      f.pieces.push_back({a, a + 0.25, U(rng)});
    }
    const auto coarse = sample_cell_averages(grid(-2.0, 0.125, 32), f);
    const auto fine = sample_cell_averages(grid(-2.0, 0.0625, 64), f);
    const auto shifted = sample_cell_averages(grid(-1.5, 0.125, 32), f);
    CHECK(total_variation(fine) == doctest::Approx(total_variation(coarse)).epsilon(1e-13));
    CHECK(total_variation(shifted) == doctest::Approx(total_variation(coarse)).epsilon(1e-13));
  }
}

TEST_CASE("l1_distance: examples and metric axioms") {
  const auto g = grid(0.0, 0.1, 20);
  std::mt19937_64 rng(1);
  const auto p = random_profile(rng, g);
  CHECK(l1_distance(p, p) == 0.0);
  std::vector<double> v(p.values().begin(), p.values().end());
  for (std::size_t j = 3; j < 10; ++j) v[j] += 0.1;
  CHECK(l1_distance(Profile(p.grid(), v), p) == doctest::Approx(0.1 * 7 * 0.1).epsilon(1e-13));
  for (int rep = 0; rep < 50; ++rep) {
    const auto a = random_profile(rng, g), b = random_profile(rng, g), c = random_profile(rng, g);
    CHECK(l1_distance(a, b) == l1_distance(b, a));
    CHECK(l1_distance(a, c) <= l1_distance(a, b) + l1_distance(b, c) + 1e-15);
  }
  CHECK_THROWS_AS(l1_distance(p, Profile::constant(grid(0.0, 0.2, 20), 0.0)), GridError);
}

TEST_CASE("l1_distance: shifted step differs by the shift") {
  const auto g = grid(-1.0, 0.01, 200);
  for (int k : {1, 7, 30}) {
    const double xi = 0.01 * k;
    const auto a = step_at(g, 0.0), b = step_at(g, xi);
    CHECK(l1_distance(a, b) == doctest::Approx(xi).epsilon(1e-12));
  }
}

TEST_CASE("property: translation bound ||u(. - xi) - u|| <= |xi| TV(u)") {
  std::mt19937_64 rng(21);
  const auto g = grid(0.0, 0.05, 60);
  for (int rep = 0; rep < 30; ++rep) {
    const auto u = random_profile(rng, g);
    for (std::ptrdiff_t k = 1; k < 8; ++k) {
      std::vector<double> s(u.size());
      for (std::size_t j = 0; j < s.size(); ++j) s[j] = u.extended(static_cast<std::ptrdiff_t>(j) - k);
      const double dist = l1_distance(Profile(u.grid(), s), u);
      CHECK(dist <= static_cast<double>(k) * g.cell_width * total_variation(u) + 1e-13);
    }
  }
}

TEST_CASE("mollify_defect: constant, step, random") {
  const double dx = 1.0 / 64.0;
  const auto dk = discretize(KernelSpec::uniform(), 1.0, dx);
  CHECK(mollify_defect(Profile::constant(grid(-2.0, dx, 256, 0.4, 0.4), 0.4), dk) ==
        doctest::Approx(0.0).epsilon(1e-14));
  // int_{-1}^0 (1 + x) dx = 1/2
  CHECK(mollify_defect(step_at(grid(-3.0, dx, 320), 0.0), dk) == doctest::Approx(0.5).epsilon(1e-12));

  std::mt19937_64 rng(17);
  const auto g = grid(-2.0, 0.01, 400);
  for (const auto& k : {KernelSpec::uniform(), KernelSpec::exponential(), KernelSpec::triangle()}) {
    const double eps = 0.1;
    const auto d = discretize(k, eps, 0.01);
    for (int rep = 0; rep < 10; ++rep) {
      const auto p = random_profile(rng, g);
      CHECK(mollify_defect(p, d) <= eps * k.first_moment() * total_variation(p) + 1e-10);
    }
  }
}

TEST_CASE("variation_on: ramp of linear interpolant") {
  const auto g = grid(0.0, 0.1, 10, 0.0, 1.0);
  std::vector<double> v(10);
  for (std::size_t j = 0; j < 10; ++j) v[j] = 0.1 * static_cast<double>(j);
  const Profile p(g, v);
  // node samples: slope 1 on [0, 0.9], then up to 1 at x = 1
  CHECK(variation_on(p, 0.0, 0.5, Anchor::kNodes) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(variation_on(p, 0.25, 0.35, Anchor::kNodes) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("Profile::interpolate honours the anchor") {
  const Profile p(grid(0.0, 1.0, 3, 0.0, 1.0), {0.0, 1.0, 0.5});
  CHECK(p.interpolate(0.5, Anchor::kNodes) == doctest::Approx(0.5));
  CHECK(p.interpolate(1.0, Anchor::kCenters) == doctest::Approx(0.5));
  CHECK(p.interpolate(1.5, Anchor::kCenters) == doctest::Approx(1.0));
}
