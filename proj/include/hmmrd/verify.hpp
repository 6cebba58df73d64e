// Manufactured-solution harness: exact Brusselator solution, error
// functionals, convergence tables and plot data.

#pragma once

#include "hmmrd/solver.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hmmrd {

class VerifyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using SpaceTimeVectorField = std::function<Point(const Point&, double)>;

struct ExactSolution {
  SpaceTimeField u;
  SpaceTimeField v;
  SpaceTimeVectorField grad_u;
  SpaceTimeVectorField grad_v;
};

/// u = exp(-x-y-t/2), v = exp(x+y+t/2): solves the Brusselator system with
/// a = 0, b = 1, μ1 = μ2 = 1/4.
ExactSolution brusselator_exact();

/// Stationary affine pair u = 1 + 2x - y, v = 0.5 - x + 3y; exact for the
/// scheme when F = G = 0.
ExactSolution affine_exact();

/// Problem whose initial and Dirichlet data are taken from `exact`.
ProblemSpec problem_from_exact(const ExactSolution& exact, double mu1, double mu2,
                               KineticsModel kinetics);

/// √(Σ|K|(exact(x_K) − u_K)²) / √(Σ|K| exact(x_K)²).
double relative_value_error(const HmmDiscretisation& disc, const DiscreteVector& u,
                            const ScalarField& exact);

/// Diamond-wise relative L² error of ∇_D u, sampling `exact_grad` at the
/// diamond point (x_K + x_σ)/2.
double relative_gradient_error(const HmmDiscretisation& disc, const DiscreteVector& u,
                               const VectorField& exact_grad);

/// log(e_coarse/e_fine) / log(h_coarse/h_fine).
double convergence_rate(double e_coarse, double e_fine, double h_coarse, double h_fine);

/// Least-squares slope of log(err) against log(h).
double loglog_slope(const std::vector<double>& h, const std::vector<double>& err);

struct ErrorReport {
  std::size_t level = 0;  // structured mesh parameter n
  double h = 0.0;
  double err_u = 0.0;
  double err_v = 0.0;
  double err_grad_u = 0.0;
  double err_grad_v = 0.0;
  double runtime_s = 0.0;
  int max_newton_iterations = 0;
  double max_norm_ratio_u = 0.0;  // max_n ‖Π u^n‖ / ‖Π u^0‖
  double max_norm_ratio_v = 0.0;
};

struct ConvergenceTable {
  std::vector<ErrorReport> rows;

  /// Rate between row i-1 and row i; empty for the first row.
  std::optional<double> rate_u(std::size_t i) const;
  std::optional<double> rate_v(std::size_t i) const;
  std::optional<double> rate_grad_u(std::size_t i) const;
  std::optional<double> rate_grad_v(std::size_t i) const;
};

/// Which length labels the h column: the leg length 1/n (default) or the
/// triangle diameter √2/n.
enum class MeshSizeLabel { leg, diameter };

struct StudySetup {
  ExactSolution exact = brusselator_exact();
  double mu1 = 0.25;
  double mu2 = 0.25;
  KineticsModel kinetics = brusselator({0.0, 1.0});
  NewtonConfig newton;
  MeshSizeLabel h_label = MeshSizeLabel::leg;
  bool parallel = true;
};

/// Solves the transient problem on the structured ladder `levels`
/// (coarse → fine) up to `final_time` with step `dt` and measures errors at
/// the final time. Solver failures are rethrown tagged with the level.
ConvergenceTable run_convergence_study(const std::vector<std::size_t>& levels, double dt,
                                       double final_time, const StudySetup& setup);

/// `h,err_u,rate_u,err_v,rate_v,err_gu,rate_gu,err_gv,rate_gv,runtime_s`,
/// 9 significant digits; rates are empty on the first row.
void write_convergence_csv(const ConvergenceTable& table, std::ostream& out);

/// Two columns `log10(h) log10(err)`.
void write_plot_data(const std::vector<double>& h, const std::vector<double>& err,
                     std::ostream& out);

}  // namespace hmmrd
