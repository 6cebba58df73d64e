// Implicit Euler / HMM gradient scheme for two coupled reaction-diffusion
// species with Dirichlet data, solved by Newton's method at each step.

#pragma once

#include "hmmrd/hmm.hpp"
#include "hmmrd/kinetics.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

namespace hmmrd {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NewtonDiverged : public SolverError {
 public:
  NewtonDiverged(int iterations, double residual);
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

class LinearSolveFailure : public SolverError {
 public:
  using SolverError::SolverError;
};

/// A step error tagged with the time level that failed.
class TimeStepFailure : public SolverError {
 public:
  TimeStepFailure(std::size_t level, double time, const std::string& cause);
  std::size_t level() const { return level_; }
  double time() const { return time_; }

 private:
  std::size_t level_;
  double time_;
};

class TimeGrid {
 public:
  /// Throws std::invalid_argument unless strictly increasing from 0.
  explicit TimeGrid(std::vector<double> times);
  /// N equal steps of T/N.
  static TimeGrid uniform(double final_time, std::size_t steps);
  /// Equal steps of `dt` up to T; T/dt must be an integer up to 1e-9.
  static TimeGrid with_step(double final_time, double dt);

  std::size_t num_steps() const { return times_.size() - 1; }
  double time(std::size_t n) const { return times_[n]; }
  /// δt^{(n+1/2)} = t^{(n+1)} - t^{(n)}
  double step(std::size_t n) const { return times_[n + 1] - times_[n]; }
  double max_step() const;
  double final_time() const { return times_.back(); }
  const std::vector<double>& times() const { return times_; }

 private:
  std::vector<double> times_;
};

struct ProblemSpec {
  double mu1 = 0.25;
  double mu2 = 0.25;
  KineticsModel kinetics;
  ScalarField u_ini;
  ScalarField v_ini;
  SpaceTimeField g;  // Dirichlet data for u
  SpaceTimeField h;  // Dirichlet data for v

  /// Throws std::invalid_argument on non-positive diffusion or missing data.
  void validate() const;
};

struct SpeciesPair {
  DiscreteVector u;
  DiscreteVector v;
};

struct NewtonConfig {
  double tol_residual = 1e-10;
  int max_iter = 20;
  double linear_tol = 1e-12;
};

/// Cellwise (next_K - prev_K) / dt.
Eigen::VectorXd discrete_time_derivative(const DiscreteVector& prev,
                                         const DiscreteVector& next, double dt);

/// Residual and Jacobian of one implicit step on a fixed mesh and time step.
///
/// Unknowns are stacked [u interior | v interior], each in the X_{D,0}
/// layout of the discretisation. The diffusion blocks and the sparsity
/// pattern are built once; only reaction entries change between Newton
/// iterations.
class StepSystem {
 public:
  StepSystem(const HmmDiscretisation& disc, const ProblemSpec& spec, double dt);

  std::size_t size() const { return 2 * n0_; }
  double dt() const { return dt_; }

  /// Equations tested against every basis function of X_{D,0}:
  ///   M (u - u_prev)/dt + μ1 A u - M F(u_K, v_K)
  ///   M (v - v_prev)/dt + μ2 A v - M G(u_K, v_K)
  /// Face rows carry diffusion only. `state` must already hold the
  /// boundary data.
  Eigen::VectorXd residual(const SpeciesPair& state, const SpeciesPair& prev) const;

  /// Exact derivative of residual() with respect to the interior unknowns.
  SparseMatrix jacobian(const SpeciesPair& state) const;

  /// Solves J x = rhs to relative residual `tol`.
  ///
  /// The time-independent part P = blockdiag(M/dt + μ1 A, M/dt + μ2 A) is
  /// factorised once (Cholesky) and used for defect correction
  /// x += P⁻¹(rhs - J x); the reaction coupling is O(dt) relative to P so
  /// this contracts quickly. If it stalls, falls back to a sparse LU of J.
  /// Throws LinearSolveFailure when neither reaches `tol`.
  Eigen::VectorXd solve(const SparseMatrix& jacobian, const Eigen::VectorXd& rhs,
                        double tol);

  struct LinearStats {
    long corrections = 0;    // defect-correction sweeps
    long lu_fallbacks = 0;
  };
  const LinearStats& linear_stats() const { return stats_; }

 private:
  const HmmDiscretisation* disc_;
  const ProblemSpec* spec_;
  double dt_;
  std::size_t nc_;
  std::size_t n0_;
  SparseMatrix diffusion_;   // unit-μ A on the full layout
  SparseMatrix base_;        // blockdiag(M/dt + μ1 A_00, M/dt + μ2 A_00) with reaction slots
  std::vector<std::array<Eigen::Index, 4>> reaction_slots_;  // per cell: uu, uv, vu, vv
  Eigen::VectorXd mass_;
  Eigen::SimplicialLDLT<SparseMatrix> block_u_;
  Eigen::SimplicialLDLT<SparseMatrix> block_v_;
  bool block_ok_ = false;
  Eigen::SparseLU<SparseMatrix> lu_;
  bool analysed_ = false;
  LinearStats stats_;

  Eigen::VectorXd apply_block_inverse(const Eigen::VectorXd& r) const;
  Eigen::VectorXd solve_lu(const SparseMatrix& jacobian, const Eigen::VectorXd& rhs,
                           double tol);
};

Eigen::VectorXd assemble_residual(const HmmDiscretisation& disc, const SpeciesPair& state,
                                  const SpeciesPair& prev, const ProblemSpec& spec, double dt);
SparseMatrix assemble_jacobian(const HmmDiscretisation& disc, const SpeciesPair& state,
                               const ProblemSpec& spec, double dt);

struct StepReport {
  int iterations = 0;
  std::vector<double> residual_history;  // residual norm before each update, then final
};

/// One implicit Euler step from `prev` to `t_next`. Newton starts from
/// `prev` with its boundary faces reset to the data at `t_next`.
SpeciesPair advance_step(StepSystem& system, const SpeciesPair& prev, double t_next,
                         const ProblemSpec& spec, const HmmDiscretisation& disc,
                         const NewtonConfig& cfg, StepReport* report = nullptr);

/// Convenience overload building a one-off StepSystem.
SpeciesPair advance_step(const HmmDiscretisation& disc, const SpeciesPair& prev,
                         double t_next, double dt, const ProblemSpec& spec,
                         const NewtonConfig& cfg, StepReport* report = nullptr);

struct LevelRecord {
  double time = 0.0;
  int newton_iterations = 0;
  double final_residual = 0.0;
  double norm_u = 0.0;  // ‖Π_D u‖_{L²}
  double norm_v = 0.0;
  std::vector<double> residual_history;
};

struct TransientSolution {
  std::vector<double> times;
  /// Every level when SolveOptions::keep_all_levels, otherwise only the
  /// first and last.
  std::vector<SpeciesPair> levels;
  std::vector<std::size_t> level_index;
  /// One record per level, including level 0 (no Newton data).
  std::vector<LevelRecord> records;

  const SpeciesPair& final_state() const { return levels.back(); }
};

struct SolveOptions {
  bool keep_all_levels = true;
  /// Called after each completed level with (level, time, state).
  std::function<void(std::size_t, double, const SpeciesPair&)> on_level;
};

TransientSolution solve_transient(const ProblemSpec& spec, const HmmDiscretisation& disc,
                                  const TimeGrid& grid, const NewtonConfig& cfg,
                                  const SolveOptions& options = {});

}  // namespace hmmrd
