#include "hmmrd/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hmmrd {

Eigen::Matrix2d KineticsModel::jacobian(double u, double v) const {
  Eigen::Matrix2d j;
  j << dF_du(u, v), dF_dv(u, v), dG_du(u, v), dG_dv(u, v);
  return j;
}

KineticsModel brusselator(const BrusselatorParams& params) {
  const double a = params.a;
  const double b = params.b;
  KineticsModel m;
  m.name = "brusselator";
  m.F = [a, b](double u, double v) { return a - (b + 1.0) * u + u * u * v; };
  m.G = [b](double u, double v) { return b * u - u * u * v; };
  m.dF_du = [b](double u, double v) { return -(b + 1.0) + 2.0 * u * v; };
  m.dF_dv = [](double u, double) { return u * u; };
  m.dG_du = [b](double u, double v) { return b - 2.0 * u * v; };
  m.dG_dv = [](double u, double) { return -u * u; };
  return m;
}

KineticsModel zero_kinetics() {
  const ReactionFn zero = [](double, double) { return 0.0; };
  return KineticsModel{"none", zero, zero, zero, zero, zero, zero};
}

KineticsModel kinetics_by_name(const std::string& name, const BrusselatorParams& params) {
  if (name == "brusselator") return brusselator(params);
  if (name == "none") return zero_kinetics();
  throw KineticsError("unknown kinetics '" + name + "'");
}

double derivative_mismatch(const KineticsModel& model, int samples, double box,
                           double step, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-box, box);
  double worst = 0.0;
  auto check = [&](const ReactionFn& f, const ReactionFn& df, double u, double v,
                   double du, double dv) {
    const double fd = (f(u + du, v + dv) - f(u - du, v - dv)) / (2.0 * step);
    const double exact = df(u, v);
    worst = std::max(worst, std::abs(exact - fd) / std::max(1.0, std::abs(exact)));
  };
  for (int i = 0; i < samples; ++i) {
    const double u = dist(rng);
    const double v = dist(rng);
    check(model.F, model.dF_du, u, v, step, 0.0);
    check(model.F, model.dF_dv, u, v, 0.0, step);
    check(model.G, model.dG_du, u, v, step, 0.0);
    check(model.G, model.dG_dv, u, v, 0.0, step);
  }
  return worst;
}

KineticsModel make_kinetics(std::string name, ReactionFn F, ReactionFn G,
                            ReactionFn dF_du, ReactionFn dF_dv, ReactionFn dG_du,
                            ReactionFn dG_dv) {
  if (!F || !G || !dF_du || !dF_dv || !dG_du || !dG_dv) {
    throw KineticsError("kinetics '" + name + "' is missing a function");
  }
  KineticsModel m{std::move(name),     std::move(F),     std::move(G),
                  std::move(dF_du),    std::move(dF_dv), std::move(dG_du),
                  std::move(dG_dv)};
  const double mismatch = derivative_mismatch(m);
  if (!(mismatch <= 1e-5)) {
    throw KineticsError("kinetics '" + m.name +
                        "' derivatives disagree with finite differences (mismatch " +
                        std::to_string(mismatch) + ")");
  }
  return m;
}

}  // namespace hmmrd
