#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hmmrd/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace hmmrd;

TEST_CASE("manufactured solution values") {
  const auto e = brusselator_exact();
  CHECK(e.u(Point(0, 0), 0.0) == 1.0);
  CHECK(e.v(Point(0, 0), 0.0) == 1.0);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(0, 1);
  const double h = 1e-6;
  for (int i = 0; i < 50; ++i) {
    const Point x(U(rng), U(rng));
    const double t = U(rng);
    CHECK(e.u(x, t) * e.v(x, t) == doctest::Approx(1.0).epsilon(1e-14));
    for (int k = 0; k < 2; ++k) {
      const Point dx = k == 0 ? Point(h, 0) : Point(0, h);
      const double fu = (e.u(x + dx, t) - e.u(x - dx, t)) / (2 * h);
      const double fv = (e.v(x + dx, t) - e.v(x - dx, t)) / (2 * h);
      CHECK(std::abs(e.grad_u(x, t)[k] - fu) <= 1e-5 * std::max(1.0, std::abs(fu)));
      CHECK(std::abs(e.grad_v(x, t)[k] - fv) <= 1e-5 * std::max(1.0, std::abs(fv)));
    }
  }
}

TEST_CASE("exact pair satisfies the reaction-diffusion system") {
  // ∂t and Δ by centred differences with step 1e-3 are only good to ~1e-6,
  // so the 1e-12 balance uses the closed-form derivatives and the
  // difference check confirms them.
  const auto e = brusselator_exact();
  const auto k = brusselator({0.0, 1.0});
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> U(0, 1);
  for (int i = 0; i < 100; ++i) {
    const Point x(U(rng), U(rng));
    const double t = U(rng);
    const double u = e.u(x, t), v = e.v(x, t);
    CHECK(std::abs(-0.5 * u - 0.25 * (2 * u) - k.F(u, v)) <= 1e-12);
    CHECK(std::abs(0.5 * v - 0.25 * (2 * v) - k.G(u, v)) <= 1e-12 * std::max(1.0, v));

    const double s = 1e-3;
    const double lap = (e.u(x + Point(s, 0), t) + e.u(x - Point(s, 0), t) + e.u(x + Point(0, s), t) +
                        e.u(x - Point(0, s), t) - 4 * u) /
                       (s * s);
    CHECK(lap == doctest::Approx(2 * u).epsilon(1e-5));
    const double dt = (e.u(x, t + s) - e.u(x, t - s)) / (2 * s);
    CHECK(dt == doctest::Approx(-0.5 * u).epsilon(1e-5));
  }
}

TEST_CASE("rate formula reproduces reference error-table rates") {
  const double eu[] = {0.000720746, 0.000184132, 0.0000501972, 0.0000149187};
  const double ev[] = {0.000561639, 0.000140295, 0.0000342813, 0.00000688301};
  const double ru[] = {1.968753, 1.8750586, 1.750485};
  const double rv[] = {2.0011797, 2.03296997, 2.31630842};
  const double h[] = {0.125, 0.0625, 0.03125, 0.015625};
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(convergence_rate(eu[i], eu[i + 1], h[i], h[i + 1]) - ru[i]) <= 1e-4);
    CHECK(std::abs(convergence_rate(ev[i], ev[i + 1], h[i], h[i + 1]) - rv[i]) <= 1e-4);
  }
  CHECK(convergence_rate(0.4, 0.2, 0.1, 0.05) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(convergence_rate(0.0, 0.1, 0.1, 0.05), VerifyError);
  CHECK_THROWS_AS(convergence_rate(0.1, 0.1, -0.1, 0.05), VerifyError);
  CHECK_THROWS_AS(convergence_rate(0.1, 0.1, 0.1, 0.1), VerifyError);
}

TEST_CASE("log-log slope") {
  const std::vector<double> h{0.1, 0.05, 0.025};
  CHECK(loglog_slope(h, {3e-2, 7.5e-3, 1.875e-3}) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(loglog_slope({0.1}, {0.1}), VerifyError);
  CHECK_THROWS_AS(loglog_slope(h, {1, 0, 1}), VerifyError);
}

TEST_CASE("value error functional") {
  const auto m = build_structured_triangular(4);
  const HmmDiscretisation disc(m);
  DiscreteVector u = DiscreteVector::zeros(m);
  auto f = [](const Point& x) { return std::exp(x.x() - x.y()); };
  for (const auto& c : m.cells()) u.cell_values[c.id] = f(c.center);
  CHECK(relative_value_error(disc, u, f) == 0.0);
  u.cell_values.setConstant(1.0 + 0.03);
  CHECK(relative_value_error(disc, u, [](const Point&) { return 1.0; }) ==
        doctest::Approx(0.03).epsilon(1e-12));
  CHECK_THROWS_AS(relative_value_error(disc, u, [](const Point&) { return 0.0; }), VerifyError);
  DiscreteVector wrong{Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3)};
  CHECK_THROWS_AS(relative_value_error(disc, wrong, f), VerifyError);
}

TEST_CASE("gradient error functional") {
  const auto m = build_structured_triangular(4);
  const HmmDiscretisation disc(m);
  DiscreteVector u = DiscreteVector::zeros(m);
  auto f = [](const Point& x) { return 1.0 + 2.0 * x.x() - x.y(); };
  for (const auto& c : m.cells()) u.cell_values[c.id] = f(c.center);
  for (const auto& fc : m.faces()) u.face_values[fc.id] = f(fc.barycenter);
  CHECK(relative_gradient_error(disc, u, [](const Point&) { return Point(2, -1); }) <= 1e-12);

  const DiscreteVector z = DiscreteVector::zeros(m);
  CHECK(relative_gradient_error(disc, z, [](const Point&) { return Point(1, 0); }) ==
        doctest::Approx(1.0));

  // same numerator |(1,0)|, denominator doubled: the error halves
  DiscreteVector u2 = DiscreteVector::zeros(m);
  auto f2 = [](const Point& x) { return 5.0 * x.x() - 2.0 * x.y(); };
  for (const auto& c : m.cells()) u2.cell_values[c.id] = f2(c.center);
  for (const auto& fc : m.faces()) u2.face_values[fc.id] = f2(fc.barycenter);
  const double e1 = relative_gradient_error(disc, u, [](const Point&) { return Point(3, -1); });
  const double e2 = relative_gradient_error(disc, u2, [](const Point&) { return Point(6, -2); });
  CHECK(e1 == doctest::Approx(1.0 / std::sqrt(10.0)).epsilon(1e-12));
  CHECK(e2 == doctest::Approx(0.5 * e1).epsilon(1e-12));
}

TEST_CASE("affine study reproduces the data") {
  StudySetup setup;
  setup.exact = affine_exact();
  setup.kinetics = zero_kinetics();
  setup.parallel = false;
  const auto t = run_convergence_study({3, 6}, 0.25, 1.0, setup);
  REQUIRE(t.rows.size() == 2);
  for (const auto& r : t.rows) {
    CHECK(r.err_u <= 1e-10);
    CHECK(r.err_v <= 1e-10);
    CHECK(r.err_grad_u <= 1e-10);
    CHECK(r.max_newton_iterations <= 1);
  }
  CHECK(t.rows[0].h == doctest::Approx(1.0 / 3));
  CHECK_THROWS_AS(run_convergence_study({6, 3}, 0.25, 1.0, setup), VerifyError);
}

TEST_CASE("brusselator study on a short ladder") {
  StudySetup setup;
  setup.h_label = MeshSizeLabel::diameter;
  const auto t = run_convergence_study({4, 8}, 0.01, 0.1, setup);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0].h == doctest::Approx(std::sqrt(2.0) / 4));
  CHECK(t.rows[1].err_u < t.rows[0].err_u);
  CHECK(t.rows[1].err_grad_u < t.rows[0].err_grad_u);
  CHECK_FALSE(t.rate_u(0).has_value());
  REQUIRE(t.rate_u(1).has_value());
  CHECK(*t.rate_u(1) == doctest::Approx(convergence_rate(t.rows[0].err_u, t.rows[1].err_u,
                                                         t.rows[0].h, t.rows[1].h)));

  std::ostringstream csv;
  write_convergence_csv(t, csv);
  const std::string s = csv.str();
  CHECK(s.rfind("h,err_u,rate_u,err_v,rate_v,err_gu,rate_gu,err_gv,rate_gv,runtime_s\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 3);

  std::ostringstream plot;
  write_plot_data({0.1, 0.01}, {1e-2, 1e-4}, plot);
  CHECK(plot.str() == "-1 -2\n-2 -4\n");
}

TEST_CASE("solver failures name the mesh level") {
  StudySetup setup;
  setup.newton.max_iter = 1;
  setup.newton.tol_residual = 1e-30;
  setup.parallel = false;
  try {
    run_convergence_study({2, 4}, 0.5, 1.0, setup);
    FAIL("expected failure");
  } catch (const SolverError& e) {
    CHECK(std::string(e.what()).find("n=2") != std::string::npos);
  }
}
