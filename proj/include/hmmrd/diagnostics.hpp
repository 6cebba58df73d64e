// Quality measures of a gradient discretisation: discrete Poincaré
// (coercivity) constant, consistency and limit-conformity defects, and the
// dual norm on Π_D(X_{D,0}).

#pragma once

#include "hmmrd/hmm.hpp"

#include <Eigen/SparseCholesky>

#include <string>
#include <utility>
#include <vector>

namespace hmmrd {

class DiagnosticsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Factorised gradient Gram matrix A_ij = ∫ ∇_D e_i · ∇_D e_j on X_{D,0},
/// shared by the dual-norm type computations.
class InteriorGram {
 public:
  explicit InteriorGram(const HmmDiscretisation& disc);
  const SparseMatrix& matrix() const { return a_; }
  /// A⁻¹ b; throws DiagnosticsError if the relative residual exceeds 1e-12.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  /// √(bᵀ A⁻¹ b)
  double dual_norm(const Eigen::VectorXd& b) const;

 private:
  SparseMatrix a_;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
};

struct CoercivityResult {
  double value = 0.0;          // C_D
  DiscreteVector extremal;     // maximiser φ*, in X_{D,0}
  int iterations = 0;
};

/// C_D = max ‖Π_D φ‖ / ‖∇_D φ‖ over X_{D,0}, by power iteration on A⁻¹M
/// seeded with ones on cells. Stops when the eigenvalue estimate changes by
/// less than `tol` relatively; throws DiagnosticsError after `max_iter`.
CoercivityResult coercivity_constant(const HmmDiscretisation& disc, double tol = 1e-8,
                                     int max_iter = 10000);

struct SmoothFunction {
  ScalarField value;
  VectorField gradient;
};

struct SmoothFlux {
  VectorField value;
  ScalarField divergence;
};

/// Upper bound of S_D(φ): ‖Π_D w − φ‖ + ‖∇_D w − ∇φ‖ at the interpolant
/// w_K = cell mean, w_σ = face mean of φ. Both norms by quadrature.
double consistency_defect(const HmmDiscretisation& disc, const SmoothFunction& phi);

/// Load vector b_i = ∫ (∇_D e_i · ψ + Π_D e_i div ψ) on X_{D,0}.
Eigen::VectorXd limit_conformity_load(const HmmDiscretisation& disc, const SmoothFlux& psi);

/// W_D(ψ) = √(bᵀ A⁻¹ b).
double limit_conformity_defect(const HmmDiscretisation& disc, const SmoothFlux& psi);
double limit_conformity_defect(const InteriorGram& gram, const HmmDiscretisation& disc,
                               const SmoothFlux& psi);

/// ‖w‖_{⋆,D} for w given by its cell values.
double dual_norm(const HmmDiscretisation& disc, const Eigen::VectorXd& cell_values);
double dual_norm(const InteriorGram& gram, const HmmDiscretisation& disc,
                 const Eigen::VectorXd& cell_values);

struct GdmQualityReport {
  double h = 0.0;
  double coercivity = 0.0;
  std::vector<std::pair<std::string, double>> consistency;
  std::vector<std::pair<std::string, double>> limit_conformity;
};

/// Named sample inputs used by the CLI and the acceptance suite.
SmoothFunction sample_function(const std::string& label);
SmoothFlux sample_flux(const std::string& label);
std::vector<std::string> sample_function_labels();
std::vector<std::string> sample_flux_labels();

GdmQualityReport quality_report(const HmmDiscretisation& disc,
                                const std::vector<std::string>& function_labels,
                                const std::vector<std::string>& flux_labels);

}  // namespace hmmrd
