#include "hmmrd/verify.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <future>
#include <iomanip>
#include <ostream>

namespace hmmrd {

ExactSolution brusselator_exact() {
  ExactSolution e;
  e.u = [](const Point& x, double t) { return std::exp(-x.x() - x.y() - 0.5 * t); };
  e.v = [](const Point& x, double t) { return std::exp(x.x() + x.y() + 0.5 * t); };
  e.grad_u = [](const Point& x, double t) {
    const double u = std::exp(-x.x() - x.y() - 0.5 * t);
    return Point(-u, -u);
  };
  e.grad_v = [](const Point& x, double t) {
    const double v = std::exp(x.x() + x.y() + 0.5 * t);
    return Point(v, v);
  };
  return e;
}

ExactSolution affine_exact() {
  ExactSolution e;
  e.u = [](const Point& x, double) { return 1.0 + 2.0 * x.x() - x.y(); };
  e.v = [](const Point& x, double) { return 0.5 - x.x() + 3.0 * x.y(); };
  e.grad_u = [](const Point&, double) { return Point(2.0, -1.0); };
  e.grad_v = [](const Point&, double) { return Point(-1.0, 3.0); };
  return e;
}

ProblemSpec problem_from_exact(const ExactSolution& exact, double mu1, double mu2,
                               KineticsModel kinetics) {
  ProblemSpec spec;
  spec.mu1 = mu1;
  spec.mu2 = mu2;
  spec.kinetics = std::move(kinetics);
  spec.u_ini = [u = exact.u](const Point& x) { return u(x, 0.0); };
  spec.v_ini = [v = exact.v](const Point& x) { return v(x, 0.0); };
  spec.g = exact.u;
  spec.h = exact.v;
  return spec;
}

double relative_value_error(const HmmDiscretisation& disc, const DiscreteVector& u,
                            const ScalarField& exact) {
  const PolytopalMesh& mesh = disc.mesh();
  if (u.cell_values.size() != static_cast<Eigen::Index>(mesh.num_cells())) {
    throw VerifyError("discrete vector does not match the mesh");
  }
  double num = 0.0, den = 0.0;
  for (const Cell& c : mesh.cells()) {
    const double e = exact(c.center);
    const double d = e - u.cell_values[static_cast<Eigen::Index>(c.id)];
    num += c.measure * d * d;
    den += c.measure * e * e;
  }
  if (den == 0.0) throw VerifyError("exact solution has zero norm");
  return std::sqrt(num / den);
}

double relative_gradient_error(const HmmDiscretisation& disc, const DiscreteVector& u,
                               const VectorField& exact_grad) {
  const PolytopalMesh& mesh = disc.mesh();
  if (u.face_values.size() != static_cast<Eigen::Index>(mesh.num_faces()) ||
      u.cell_values.size() != static_cast<Eigen::Index>(mesh.num_cells())) {
    throw VerifyError("discrete vector does not match the mesh");
  }
  const DiamondField grad = disc.reconstruct_gradient(u);
  double num = 0.0, den = 0.0;
  for (const Cell& c : mesh.cells()) {
    for (std::size_t j = 0; j < c.num_faces(); ++j) {
      const std::size_t dm = disc.diamond_offset(c.id) + j;
      const Point x = 0.5 * (c.center + mesh.face(c.face_ids[j]).barycenter);
      const Point e = exact_grad(x);
      num += disc.diamond_volume(dm) * (e - grad[dm]).squaredNorm();
      den += disc.diamond_volume(dm) * e.squaredNorm();
    }
  }
  if (den == 0.0) throw VerifyError("exact gradient has zero norm");
  return std::sqrt(num / den);
}

double convergence_rate(double e_coarse, double e_fine, double h_coarse, double h_fine) {
  if (!(e_coarse > 0.0) || !(e_fine > 0.0) || !(h_coarse > 0.0) || !(h_fine > 0.0)) {
    throw VerifyError("convergence_rate needs positive errors and mesh sizes");
  }
  if (h_coarse == h_fine) throw VerifyError("convergence_rate needs distinct mesh sizes");
  return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

double loglog_slope(const std::vector<double>& h, const std::vector<double>& err) {
  if (h.size() != err.size() || h.size() < 2) {
    throw VerifyError("loglog_slope needs at least two matching samples");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0) || !(err[i] > 0.0)) throw VerifyError("loglog_slope needs positive data");
    const double x = std::log(h[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

std::optional<double> rate_between(const ConvergenceTable& t, std::size_t i,
                                   double ErrorReport::*field) {
  if (i == 0 || i >= t.rows.size()) return std::nullopt;
  const auto& a = t.rows[i - 1];
  const auto& b = t.rows[i];
  if (!(a.*field > 0.0) || !(b.*field > 0.0)) return std::nullopt;
  return convergence_rate(a.*field, b.*field, a.h, b.h);
}

ErrorReport run_level(std::size_t n, double dt, double final_time, const StudySetup& setup) {
  const auto start = std::chrono::steady_clock::now();
  const PolytopalMesh mesh = build_structured_triangular(n);
  const HmmDiscretisation disc(mesh);
  const ProblemSpec spec =
      problem_from_exact(setup.exact, setup.mu1, setup.mu2, setup.kinetics);
  const TimeGrid grid = TimeGrid::with_step(final_time, dt);

  SolveOptions options;
  options.keep_all_levels = false;
  const TransientSolution sol = solve_transient(spec, disc, grid, setup.newton, options);

  const double t = grid.final_time();
  const SpeciesPair& last = sol.final_state();
  ErrorReport r;
  r.level = n;
  r.h = setup.h_label == MeshSizeLabel::leg ? 1.0 / static_cast<double>(n) : mesh.h();
  r.err_u = relative_value_error(disc, last.u, [&](const Point& x) { return setup.exact.u(x, t); });
  r.err_v = relative_value_error(disc, last.v, [&](const Point& x) { return setup.exact.v(x, t); });
  r.err_grad_u = relative_gradient_error(
      disc, last.u, [&](const Point& x) { return setup.exact.grad_u(x, t); });
  r.err_grad_v = relative_gradient_error(
      disc, last.v, [&](const Point& x) { return setup.exact.grad_v(x, t); });
  const double u0 = sol.records.front().norm_u;
  const double v0 = sol.records.front().norm_v;
  for (const auto& rec : sol.records) {
    r.max_newton_iterations = std::max(r.max_newton_iterations, rec.newton_iterations);
    r.max_norm_ratio_u = std::max(r.max_norm_ratio_u, rec.norm_u / u0);
    r.max_norm_ratio_v = std::max(r.max_norm_ratio_v, rec.norm_v / v0);
  }
  r.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace

std::optional<double> ConvergenceTable::rate_u(std::size_t i) const {
  return rate_between(*this, i, &ErrorReport::err_u);
}
std::optional<double> ConvergenceTable::rate_v(std::size_t i) const {
  return rate_between(*this, i, &ErrorReport::err_v);
}
std::optional<double> ConvergenceTable::rate_grad_u(std::size_t i) const {
  return rate_between(*this, i, &ErrorReport::err_grad_u);
}
std::optional<double> ConvergenceTable::rate_grad_v(std::size_t i) const {
  return rate_between(*this, i, &ErrorReport::err_grad_v);
}

ConvergenceTable run_convergence_study(const std::vector<std::size_t>& levels, double dt,
                                       double final_time, const StudySetup& setup) {
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (levels[i] <= levels[i - 1]) {
      throw VerifyError("convergence levels must be strictly increasing (coarse to fine)");
    }
  }
  ConvergenceTable table;
  table.rows.resize(levels.size());

  auto tagged = [&](std::size_t i) {
    try {
      return run_level(levels[i], dt, final_time, setup);
    } catch (const std::exception& e) {
      throw SolverError("mesh level n=" + std::to_string(levels[i]) + ": " + e.what());
    }
  };

  if (setup.parallel && levels.size() > 1) {
    std::vector<std::future<ErrorReport>> jobs;
    jobs.reserve(levels.size());
    for (std::size_t i = 0; i < levels.size(); ++i) {
      jobs.push_back(std::async(std::launch::async, tagged, i));
    }
    for (std::size_t i = 0; i < levels.size(); ++i) table.rows[i] = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < levels.size(); ++i) table.rows[i] = tagged(i);
  }
  return table;
}

void write_convergence_csv(const ConvergenceTable& table, std::ostream& out) {
  out << "h,err_u,rate_u,err_v,rate_v,err_gu,rate_gu,err_gv,rate_gv,runtime_s\n";
  const auto old_flags = out.flags();
  const auto old_precision = out.precision();
  out << std::setprecision(9);
  auto rate = [&out](const std::optional<double>& r) {
    if (r) out << *r;
  };
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    out << r.h << ',' << r.err_u << ',';
    rate(table.rate_u(i));
    out << ',' << r.err_v << ',';
    rate(table.rate_v(i));
    out << ',' << r.err_grad_u << ',';
    rate(table.rate_grad_u(i));
    out << ',' << r.err_grad_v << ',';
    rate(table.rate_grad_v(i));
    out << ',' << r.runtime_s << '\n';
  }
  out.flags(old_flags);
  out.precision(old_precision);
}

void write_plot_data(const std::vector<double>& h, const std::vector<double>& err,
                     std::ostream& out) {
  if (h.size() != err.size()) throw VerifyError("plot data columns differ in length");
  const auto old_precision = out.precision();
  out << std::setprecision(9);
  for (std::size_t i = 0; i < h.size(); ++i) {
    out << std::log10(h[i]) << ' ' << std::log10(err[i]) << '\n';
  }
  out.precision(old_precision);
}

}  // namespace hmmrd
