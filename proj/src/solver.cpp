#include "hmmrd/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

namespace hmmrd {

NewtonDiverged::NewtonDiverged(int iterations, double residual)
    : SolverError("Newton did not converge after " + std::to_string(iterations) +
                  " iterations (residual " + std::to_string(residual) + ")"),
      iterations_(iterations),
      residual_(residual) {}

TimeStepFailure::TimeStepFailure(std::size_t level, double time, const std::string& cause)
    : SolverError("time level " + std::to_string(level) + " (t = " + std::to_string(time) +
                  "): " + cause),
      level_(level),
      time_(time) {}

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
  if (times_.empty() || times_.front() != 0.0) {
    throw std::invalid_argument("time grid must start at t = 0");
  }
  for (std::size_t n = 1; n < times_.size(); ++n) {
    if (!(times_[n] > times_[n - 1])) {
      throw std::invalid_argument("time grid must be strictly increasing");
    }
  }
}

TimeGrid TimeGrid::uniform(double final_time, std::size_t steps) {
  if (steps == 0) return TimeGrid({0.0});
  if (!(final_time > 0.0)) throw std::invalid_argument("final time must be positive");
  std::vector<double> t(steps + 1);
  for (std::size_t n = 0; n <= steps; ++n) {
    t[n] = final_time * static_cast<double>(n) / static_cast<double>(steps);
  }
  return TimeGrid(std::move(t));
}

TimeGrid TimeGrid::with_step(double final_time, double dt) {
  if (!(dt > 0.0) || !(final_time > 0.0)) {
    throw std::invalid_argument("dt and T must be positive");
  }
  const double ratio = final_time / dt;
  const double steps = std::round(ratio);
  if (std::abs(ratio - steps) > 1e-9 * std::max(1.0, ratio) || steps < 1.0) {
    throw std::invalid_argument("T is not an integer multiple of dt");
  }
  return uniform(final_time, static_cast<std::size_t>(steps));
}

double TimeGrid::max_step() const {
  double m = 0.0;
  for (std::size_t n = 0; n + 1 < times_.size(); ++n) m = std::max(m, step(n));
  return m;
}

void ProblemSpec::validate() const {
  if (!(mu1 > 0.0) || !(mu2 > 0.0)) {
    throw std::invalid_argument("diffusion coefficients must be positive");
  }
  if (!u_ini || !v_ini || !g || !h) {
    throw std::invalid_argument("initial and boundary data must be set");
  }
  if (!kinetics.F || !kinetics.G || !kinetics.dF_du || !kinetics.dF_dv ||
      !kinetics.dG_du || !kinetics.dG_dv) {
    throw std::invalid_argument("kinetics model is incomplete");
  }
}

Eigen::VectorXd discrete_time_derivative(const DiscreteVector& prev,
                                         const DiscreteVector& next, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  return (next.cell_values - prev.cell_values) / dt;
}

namespace {

Eigen::Index value_index(const SparseMatrix& m, Eigen::Index row, Eigen::Index col) {
  const auto* outer = m.outerIndexPtr();
  const auto* inner = m.innerIndexPtr();
  const auto* begin = inner + outer[col];
  const auto* end = inner + outer[col + 1];
  const auto* it = std::lower_bound(begin, end, static_cast<int>(row));
  if (it == end || *it != row) {
    throw std::logic_error("entry missing from Jacobian pattern");
  }
  return static_cast<Eigen::Index>(it - inner);
}

void check_sizes(const HmmDiscretisation& disc, const SpeciesPair& s, const char* what) {
  const auto nc = static_cast<Eigen::Index>(disc.mesh().num_cells());
  const auto nf = static_cast<Eigen::Index>(disc.mesh().num_faces());
  if (s.u.cell_values.size() != nc || s.v.cell_values.size() != nc ||
      s.u.face_values.size() != nf || s.v.face_values.size() != nf) {
    throw std::invalid_argument(std::string(what) + " does not match the mesh dimensions");
  }
}

}  // namespace

StepSystem::StepSystem(const HmmDiscretisation& disc, const ProblemSpec& spec, double dt)
    : disc_(&disc),
      spec_(&spec),
      dt_(dt),
      nc_(disc.mesh().num_cells()),
      n0_(disc.num_interior_dofs()) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  spec.validate();
  diffusion_ = disc.assemble_diffusion(1.0);
  mass_ = disc.assemble_mass();

  const SparseMatrix a00 = disc.restrict_to_interior(diffusion_);
  std::vector<Triplet> triplets;
  triplets.reserve(2 * static_cast<std::size_t>(a00.nonZeros()) + 4 * nc_);
  const int off = static_cast<int>(n0_);
  for (Eigen::Index col = 0; col < a00.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(a00, col); it; ++it) {
      const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
      triplets.emplace_back(r, c, spec.mu1 * it.value());
      triplets.emplace_back(r + off, c + off, spec.mu2 * it.value());
    }
  }
  for (std::size_t k = 0; k < nc_; ++k) {
    const int i = static_cast<int>(k);
    const double m = mass_[i] / dt;
    triplets.emplace_back(i, i, m);
    triplets.emplace_back(i + off, i + off, m);
    triplets.emplace_back(i, i + off, 0.0);
    triplets.emplace_back(i + off, i, 0.0);
  }
  {
    SparseMatrix pu = spec.mu1 * a00;
    SparseMatrix pv = spec.mu2 * a00;
    for (std::size_t k = 0; k < nc_; ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      pu.coeffRef(i, i) += mass_[i] / dt;
      pv.coeffRef(i, i) += mass_[i] / dt;
    }
    block_u_.compute(pu);
    block_v_.compute(pv);
    block_ok_ = block_u_.info() == Eigen::Success && block_v_.info() == Eigen::Success;
  }

  const auto n = static_cast<Eigen::Index>(size());
  base_.resize(n, n);
  base_.setFromTriplets(triplets.begin(), triplets.end());
  base_.makeCompressed();

  reaction_slots_.resize(nc_);
  for (std::size_t k = 0; k < nc_; ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    const auto j = i + static_cast<Eigen::Index>(n0_);
    reaction_slots_[k] = {value_index(base_, i, i), value_index(base_, i, j),
                          value_index(base_, j, i), value_index(base_, j, j)};
  }
}

Eigen::VectorXd StepSystem::residual(const SpeciesPair& state,
                                     const SpeciesPair& prev) const {
  check_sizes(*disc_, state, "state");
  check_sizes(*disc_, prev, "previous state");
  const Eigen::VectorXd au = diffusion_ * disc_->to_full(state.u);
  const Eigen::VectorXd av = diffusion_ * disc_->to_full(state.v);
  const auto& dofs = disc_->interior_dofs();
  const auto& kin = spec_->kinetics;

  Eigen::VectorXd r(static_cast<Eigen::Index>(size()));
  const auto off = static_cast<Eigen::Index>(n0_);
  for (std::size_t i = 0; i < n0_; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const auto dof = static_cast<Eigen::Index>(dofs[i]);
    r[row] = spec_->mu1 * au[dof];
    r[row + off] = spec_->mu2 * av[dof];
  }
  for (std::size_t k = 0; k < nc_; ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    const double u = state.u.cell_values[i];
    const double v = state.v.cell_values[i];
    r[i] += mass_[i] * ((u - prev.u.cell_values[i]) / dt_ - kin.F(u, v));
    r[i + off] += mass_[i] * ((v - prev.v.cell_values[i]) / dt_ - kin.G(u, v));
  }
  return r;
}

SparseMatrix StepSystem::jacobian(const SpeciesPair& state) const {
  check_sizes(*disc_, state, "state");
  SparseMatrix j = base_;
  double* values = j.valuePtr();
  const auto& kin = spec_->kinetics;
  for (std::size_t k = 0; k < nc_; ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    const double u = state.u.cell_values[i];
    const double v = state.v.cell_values[i];
    const double m = mass_[i];
    const auto& slot = reaction_slots_[k];
    values[slot[0]] -= m * kin.dF_du(u, v);
    values[slot[1]] -= m * kin.dF_dv(u, v);
    values[slot[2]] -= m * kin.dG_du(u, v);
    values[slot[3]] -= m * kin.dG_dv(u, v);
  }
  return j;
}

Eigen::VectorXd StepSystem::apply_block_inverse(const Eigen::VectorXd& r) const {
  const auto n0 = static_cast<Eigen::Index>(n0_);
  Eigen::VectorXd z(r.size());
  z.head(n0) = block_u_.solve(r.head(n0));
  z.tail(n0) = block_v_.solve(r.tail(n0));
  return z;
}

Eigen::VectorXd StepSystem::solve(const SparseMatrix& jacobian, const Eigen::VectorXd& rhs,
                                  double tol) {
  const double scale = rhs.norm();
  if (scale == 0.0) return Eigen::VectorXd::Zero(rhs.size());

  if (block_ok_) {
    constexpr int kMaxSweeps = 50;
    constexpr double kStallRatio = 0.5;
    Eigen::VectorXd x = apply_block_inverse(rhs);
    double previous = scale;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
      const Eigen::VectorXd res = rhs - jacobian * x;
      const double norm = res.norm();
      ++stats_.corrections;
      if (norm <= tol * scale) return x;
      if (!std::isfinite(norm) || norm > kStallRatio * previous) break;
      previous = norm;
      x += apply_block_inverse(res);
    }
  }
  ++stats_.lu_fallbacks;
  return solve_lu(jacobian, rhs, tol);
}

Eigen::VectorXd StepSystem::solve_lu(const SparseMatrix& jacobian, const Eigen::VectorXd& rhs,
                                     double tol) {
  if (!analysed_) {
    lu_.analyzePattern(jacobian);
    analysed_ = true;
  }
  lu_.factorize(jacobian);
  if (lu_.info() != Eigen::Success) {
    throw LinearSolveFailure("sparse LU factorisation failed: " + lu_.lastErrorMessage());
  }
  const double scale = rhs.norm();
  Eigen::VectorXd x = lu_.solve(rhs);
  Eigen::VectorXd res = rhs - jacobian * x;
  // One pass of iterative refinement if the direct solve fell short.
  if (res.norm() > tol * scale) {
    x += lu_.solve(res);
    res = rhs - jacobian * x;
  }
  if (!(res.norm() <= tol * scale)) {
    std::ostringstream msg;
    msg << "linear solve relative residual " << res.norm() / scale << " exceeds " << tol;
    throw LinearSolveFailure(msg.str());
  }
  return x;
}

Eigen::VectorXd assemble_residual(const HmmDiscretisation& disc, const SpeciesPair& state,
                                  const SpeciesPair& prev, const ProblemSpec& spec,
                                  double dt) {
  return StepSystem(disc, spec, dt).residual(state, prev);
}

SparseMatrix assemble_jacobian(const HmmDiscretisation& disc, const SpeciesPair& state,
                               const ProblemSpec& spec, double dt) {
  return StepSystem(disc, spec, dt).jacobian(state);
}

SpeciesPair advance_step(StepSystem& system, const SpeciesPair& prev, double t_next,
                         const ProblemSpec& spec, const HmmDiscretisation& disc,
                         const NewtonConfig& cfg, StepReport* report) {
  if (!(cfg.tol_residual > 0.0) || cfg.max_iter < 1) {
    throw std::invalid_argument("Newton tolerance must be positive and max_iter >= 1");
  }
  SpeciesPair state = prev;
  disc.apply_boundary(spec.g, t_next, state.u);
  disc.apply_boundary(spec.h, t_next, state.v);

  const std::size_t n0 = disc.num_interior_dofs();
  const auto off = static_cast<Eigen::Index>(n0);
  const auto& dofs = disc.interior_dofs();
  const std::size_t nc = disc.mesh().num_cells();

  StepReport local;
  StepReport& rep = report ? *report : local;
  rep = StepReport{};
  for (int iter = 0;; ++iter) {
    const Eigen::VectorXd r = system.residual(state, prev);
    const double norm = r.norm();
    rep.residual_history.push_back(norm);
    if (!std::isfinite(norm)) throw NewtonDiverged(iter, norm);
    if (norm <= cfg.tol_residual) {
      rep.iterations = iter;
      return state;
    }
    if (iter == cfg.max_iter) throw NewtonDiverged(iter, norm);

    const Eigen::VectorXd dx = system.solve(system.jacobian(state), -r, cfg.linear_tol);
    for (std::size_t i = 0; i < n0; ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      const std::size_t dof = dofs[i];
      if (dof < nc) {
        state.u.cell_values[static_cast<Eigen::Index>(dof)] += dx[row];
        state.v.cell_values[static_cast<Eigen::Index>(dof)] += dx[row + off];
      } else {
        state.u.face_values[static_cast<Eigen::Index>(dof - nc)] += dx[row];
        state.v.face_values[static_cast<Eigen::Index>(dof - nc)] += dx[row + off];
      }
    }
  }
}

SpeciesPair advance_step(const HmmDiscretisation& disc, const SpeciesPair& prev,
                         double t_next, double dt, const ProblemSpec& spec,
                         const NewtonConfig& cfg, StepReport* report) {
  StepSystem system(disc, spec, dt);
  return advance_step(system, prev, t_next, spec, disc, cfg, report);
}

TransientSolution solve_transient(const ProblemSpec& spec, const HmmDiscretisation& disc,
                                  const TimeGrid& grid, const NewtonConfig& cfg,
                                  const SolveOptions& options) {
  spec.validate();
  TransientSolution sol;
  sol.times = grid.times();

  SpeciesPair current{disc.interpolate_initial(spec.u_ini),
                      disc.interpolate_initial(spec.v_ini)};
  auto record_level = [&](std::size_t n, const StepReport* step) {
    LevelRecord rec;
    rec.time = grid.time(n);
    rec.norm_u = disc.function_norm(current.u);
    rec.norm_v = disc.function_norm(current.v);
    if (step) {
      rec.newton_iterations = step->iterations;
      rec.final_residual = step->residual_history.back();
      rec.residual_history = step->residual_history;
    }
    sol.records.push_back(std::move(rec));
    if (options.keep_all_levels || n == 0 || n == grid.num_steps()) {
      sol.levels.push_back(current);
      sol.level_index.push_back(n);
    }
    if (options.on_level) options.on_level(n, grid.time(n), current);
  };
  record_level(0, nullptr);

  std::optional<StepSystem> system;
  for (std::size_t n = 0; n < grid.num_steps(); ++n) {
    const double dt = grid.step(n);
    if (!system || std::abs(system->dt() - dt) > 1e-14 * dt) {
      system.emplace(disc, spec, dt);
    }
    StepReport step;
    try {
      current = advance_step(*system, current, grid.time(n + 1), spec, disc, cfg, &step);
    } catch (const SolverError& e) {
      throw TimeStepFailure(n + 1, grid.time(n + 1), e.what());
    }
    record_level(n + 1, &step);
  }
  return sol;
}

}  // namespace hmmrd
