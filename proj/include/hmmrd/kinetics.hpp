// Reaction terms F(u, v), G(u, v) and their partial derivatives.

#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace hmmrd {

class KineticsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using ReactionFn = std::function<double(double, double)>;

struct KineticsModel {
  std::string name;
  ReactionFn F, G;
  ReactionFn dF_du, dF_dv, dG_du, dG_dv;

  /// [[∂F/∂u, ∂F/∂v], [∂G/∂u, ∂G/∂v]] at (u, v).
  Eigen::Matrix2d jacobian(double u, double v) const;
};

struct BrusselatorParams {
  double a = 0.0;
  double b = 1.0;
};

/// F = a - (b+1)u + u²v, G = bu - u²v.
KineticsModel brusselator(const BrusselatorParams& params);

/// F = G = 0; pure diffusion.
KineticsModel zero_kinetics();

/// Preset lookup: "brusselator" or "none".
KineticsModel kinetics_by_name(const std::string& name, const BrusselatorParams& params);

/// Largest mismatch between the analytic derivatives and centred
/// differences over `samples` uniform points in [-box, box]², measured as
/// |analytic - fd| / max(1, |analytic|).
double derivative_mismatch(const KineticsModel& model, int samples = 100,
                           double box = 2.0, double step = 1e-6,
                           std::uint64_t seed = 20240601);

/// Registers a user model. Rejects it with KineticsError unless the
/// supplied derivatives pass the finite-difference check at 1e-5.
KineticsModel make_kinetics(std::string name, ReactionFn F, ReactionFn G,
                            ReactionFn dF_du, ReactionFn dF_dv, ReactionFn dG_du,
                            ReactionFn dG_dv);

}  // namespace hmmrd
