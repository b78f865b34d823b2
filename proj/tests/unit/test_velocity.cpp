#include <doctest.h>

#include <cmath>
#include <random>

#include "nlt/errors.hpp"
#include "nlt/velocity.hpp"

using namespace nlt;

TEST_CASE("flux: Greenshields values") {
  const auto vm = VelocityModel::greenshields();
  CHECK(flux(vm, 0.0) == 0.0);
  CHECK(flux(vm, 1.0) == 0.0);
  CHECK(flux(vm, 0.5) == 0.25);
  CHECK_THROWS_AS(flux(vm, 1.5), DomainError);
  CHECK_THROWS_AS(flux(vm, -0.1), DomainError);
  CHECK(vm.max_abs_V() == doctest::Approx(1.0));
  CHECK(vm.lip_const() == doctest::Approx(1.0));
  CHECK(vm.max_abs_flux_slope() == doctest::Approx(1.0));
  CHECK(vm.nonnegative());
}

TEST_CASE("kruzkov: a = b and the c = 0, 1 pairs") {
  const auto vm = VelocityModel::greenshields();
  const auto k = kruzkov(vm, 0.3);
  CHECK(k.alpha(0.3) == 0.0);
  CHECK(k.beta(0.3) == 0.0);
  CHECK(kruzkov_flux(vm, 0.7, 0.7) == 0.0);
  const auto k0 = kruzkov(vm, 0.0), k1 = kruzkov(vm, 1.0);
  for (double u = 0.05; u < 1.0; u += 0.1) {
    CHECK(k0.beta(u) == doctest::Approx(u * (1.0 - u)).epsilon(1e-15));
    CHECK(k1.beta(u) == doctest::Approx(-u * (1.0 - u)).epsilon(1e-15));
  }
}

TEST_CASE("property: flux(0) = 0 and flux(1) = 0 iff V(1) = 0") {
  const auto t = VelocityModel::from_table({{0.0, 1.0}, {0.5, 0.8}, {1.0, 0.2}});
  CHECK(flux(t, 0.0) == 0.0);
  CHECK(flux(t, 1.0) == doctest::Approx(0.2));
  CHECK(t.max_abs_V() == doctest::Approx(1.0));
  CHECK(t.lip_const() == doctest::Approx(1.2));
}

TEST_CASE("property: kruzkov flux is symmetric") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const auto vm = VelocityModel::from_table({{0.0, 1.0}, {0.3, 0.9}, {1.0, 0.0}});
  for (int i = 0; i < 500; ++i) {
    const double a = U(rng), b = U(rng);
    CHECK(kruzkov_flux(vm, a, b) == kruzkov_flux(vm, b, a));
  }
}

TEST_CASE("property: entropy pair consistency by finite differences") {
  const auto vm = VelocityModel::greenshields();
  for (double c : {0.1, 0.5, 0.8}) {
    const auto k = kruzkov(vm, c);
    for (double u = 0.02; u < 1.0; u += 0.03) {
      if (std::abs(u - c) < 0.01) continue;
      const double d = 1e-6;
      const double fd = (k.beta(u + d) - k.beta(u - d)) / (2 * d);
      const double exact = (u > c ? 1.0 : -1.0) * (vm.V(u) + u * vm.V_prime(u));
      CHECK(fd == doctest::Approx(exact).epsilon(1e-7));
    }
  }
}

TEST_CASE("from_table: rejects increasing speed laws and partial coverage") {
  CHECK_THROWS_AS(VelocityModel::from_table({{0.0, 0.5}, {1.0, 0.9}}), DomainError);
  CHECK_THROWS_AS(VelocityModel::from_table({{0.0, 1.0}, {0.5, 0.5}}), DomainError);
}

TEST_CASE("custom: negative speeds are flagged") {
  const auto vm = VelocityModel::custom(
      "signed", [](double w) { return 0.5 - w; }, [](double) { return -1.0; });
  CHECK_FALSE(vm.nonnegative());
  CHECK(vm.max_abs_V() == doctest::Approx(0.5));
}
