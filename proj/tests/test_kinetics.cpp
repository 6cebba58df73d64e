#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hmmrd/kinetics.hpp"

#include <cmath>
#include <random>

using namespace hmmrd;

TEST_CASE("brusselator values") {
  const auto k = brusselator({0.0, 1.0});
  for (double s : {-1.3, 0.0, 0.4, 2.0}) {
    const double u = std::exp(-s), v = std::exp(s);
    CHECK(k.F(u, v) == doctest::Approx(-u).epsilon(1e-14));
    CHECK(std::abs(k.G(u, v)) < 1e-14 * std::max(1.0, u));
  }
  const auto k2 = brusselator({0.7, 3.0});
  CHECK(k2.F(0, 0) == 0.7);
  CHECK(k2.G(0, 0) == 0.0);
  CHECK(k2.F(2, 1) == doctest::Approx(0.7 - 4.0 * 2 + 4.0));
  CHECK(k2.G(2, 1) == doctest::Approx(3.0 * 2 - 4.0));
}

TEST_CASE("brusselator jacobian at hand-computed points") {
  const auto k = brusselator({0.0, 1.0});
  Eigen::Matrix2d j0;
  j0 << -2, 0, 1, 0;
  CHECK((k.jacobian(0, 0) - j0).norm() == 0.0);
  Eigen::Matrix2d j1;
  j1 << 0, 1, -1, -1;
  CHECK((k.jacobian(1, 1) - j1).norm() < 1e-15);
}

TEST_CASE("analytic derivatives agree with centred differences") {
  for (const auto& k : {brusselator({0.0, 1.0}), brusselator({1.0, 3.0}), zero_kinetics()}) {
    CHECK(derivative_mismatch(k) <= 1e-5);
  }
  // independent check at our own sample points
  const auto k = brusselator({0.5, 2.0});
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  const double h = 1e-6;
  for (int i = 0; i < 100; ++i) {
    const double u = U(rng), v = U(rng);
    const Eigen::Matrix2d J = k.jacobian(u, v);
    Eigen::Matrix2d fd;
    fd << (k.F(u + h, v) - k.F(u - h, v)) / (2 * h), (k.F(u, v + h) - k.F(u, v - h)) / (2 * h),
        (k.G(u + h, v) - k.G(u - h, v)) / (2 * h), (k.G(u, v + h) - k.G(u, v - h)) / (2 * h);
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        CHECK(std::abs(J(r, c) - fd(r, c)) <= 1e-5 * std::max(1.0, std::abs(J(r, c))));
      }
    }
  }
}

TEST_CASE("zero kinetics") {
  const auto k = zero_kinetics();
  CHECK(k.name == "none");
  CHECK(k.F(3, 4) == 0.0);
  CHECK(k.G(-1, 2) == 0.0);
  CHECK(k.jacobian(1, 2).norm() == 0.0);
}

TEST_CASE("presets by name") {
  CHECK(kinetics_by_name("brusselator", {}).F(1, 1) == doctest::Approx(0.0 - 2 + 1));
  CHECK(kinetics_by_name("none", {}).F(1, 1) == 0.0);
  CHECK_THROWS_AS(kinetics_by_name("lotka", {}), KineticsError);
}

TEST_CASE("user models must supply correct derivatives") {
  auto F = [](double u, double v) { return u * v; };
  auto G = [](double u, double) { return -u * u; };
  const auto good = make_kinetics(
      "product", F, G, [](double, double v) { return v; }, [](double u, double) { return u; },
      [](double u, double) { return -2 * u; }, [](double, double) { return 0.0; });
  CHECK(good.name == "product");
  CHECK(good.jacobian(2, 3)(0, 0) == 3.0);

  CHECK_THROWS_AS(make_kinetics(
                      "wrong", F, G, [](double, double v) { return v; },
                      [](double u, double) { return u; }, [](double u, double) { return 2 * u; },
                      [](double, double) { return 0.0; }),
                  KineticsError);
}

TEST_CASE("manufactured pair balances both equations") {
  // ∂t u - Δu/4 - F = 0 and ∂t v - Δv/4 - G = 0, using the closed-form
  // derivatives ∂t u = -u/2, Δu = 2u, ∂t v = v/2, Δv = 2v.
  const auto k = brusselator({0.0, 1.0});
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> X(0.0, 1.0), T(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double x = X(rng), y = X(rng), t = T(rng);
    const double u = std::exp(-x - y - 0.5 * t), v = std::exp(x + y + 0.5 * t);
    CHECK(std::abs(-0.5 * u - 0.25 * 2 * u - k.F(u, v)) <= 1e-12);
    CHECK(std::abs(0.5 * v - 0.25 * 2 * v - k.G(u, v)) <= 1e-12 * std::max(1.0, v));
  }
}
