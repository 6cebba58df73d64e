// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include "hmmrd/diagnostics.hpp"
#include "hmmrd/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>

using namespace hmmrd;

namespace {

int g_failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s  %-28s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

bool in(double x, double lo, double hi) { return x >= lo && x <= hi; }

void rate_criteria() {
  StudySetup setup;  // manufactured Brusselator pair, a=0, b=1, mu=0.25
  const std::vector<std::size_t> levels{8, 16, 32};
  const auto t = run_convergence_study(levels, 1e-3, 1.0, setup);

  bool ok = true;
  std::string detail;
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    const double ru = *t.rate_u(i), rv = *t.rate_v(i);
    ok = ok && in(ru, 1.7, 2.4) && in(rv, 1.7, 2.4);
    detail += "n=" + std::to_string(levels[i]) + ": u " + fmt(ru) + " v " + fmt(rv) + "; ";
  }
  report(ok, "value rates in [1.7,2.4]", detail);

  const double eu = t.rows[0].err_u, ev = t.rows[0].err_v;
  const double ru = eu / 0.000720746, rv = ev / 0.000561639;
  report(in(ru, 1.0 / 3, 3.0) && in(rv, 1.0 / 3, 3.0), "error magnitude at n=8",
         "err_u " + fmt(eu) + " (x" + fmt(ru) + "), err_v " + fmt(ev) + " (x" + fmt(rv) + ")");

  std::vector<double> h, gu, gv;
  for (const auto& r : t.rows) {
    h.push_back(r.h);
    gu.push_back(r.err_grad_u);
    gv.push_back(r.err_grad_v);
  }
  const double su = loglog_slope(h, gu), sv = loglog_slope(h, gv);
  report(in(su, 0.8, 1.2) && in(sv, 0.8, 1.2), "gradient slopes in [0.8,1.2]",
         "u " + fmt(su) + ", v " + fmt(sv));

  int newton = 0;
  for (const auto& r : t.rows) newton = std::max(newton, r.max_newton_iterations);
  report(newton <= 5, "Newton iterations <= 5", "max " + std::to_string(newton) + " at tol 1e-10");
}

void rate_arithmetic() {
  const double eu[] = {0.000720746, 0.000184132, 0.0000501972, 0.0000149187};
  const double ev[] = {0.000561639, 0.000140295, 0.0000342813, 0.00000688301};
  const double ru[] = {1.968753, 1.8750586, 1.750485};
  const double rv[] = {2.0011797, 2.03296997, 2.31630842};
  const double h[] = {0.125, 0.0625, 0.03125, 0.015625};
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    worst = std::max(worst, std::abs(convergence_rate(eu[i], eu[i + 1], h[i], h[i + 1]) - ru[i]));
    worst = std::max(worst, std::abs(convergence_rate(ev[i], ev[i + 1], h[i], h[i + 1]) - rv[i]));
  }
  report(worst <= 1e-4, "rate arithmetic", "max deviation " + fmt(worst));
}

void affine_exactness() {
  const ExactSolution ex = affine_exact();
  const ProblemSpec spec = problem_from_exact(ex, 0.25, 0.25, zero_kinetics());
  double worst = 0.0;
  for (std::size_t n : {2, 4, 8, 16, 32}) {
    const PolytopalMesh mesh = build_structured_triangular(n);
    const HmmDiscretisation disc(mesh);
    SolveOptions opt;
    opt.keep_all_levels = false;
    opt.on_level = [&](std::size_t level, double t, const SpeciesPair& s) {
      for (const auto& c : mesh.cells()) {
        worst = std::max(worst, std::abs(s.u.cell_values[c.id] - ex.u(c.center, t)));
        worst = std::max(worst, std::abs(s.v.cell_values[c.id] - ex.v(c.center, t)));
      }
      // the initial interpolant has zero face values by construction
      if (level == 0) return;
      for (const auto& f : mesh.faces()) {
        worst = std::max(worst, std::abs(s.u.face_values[f.id] - ex.u(f.barycenter, t)));
        worst = std::max(worst, std::abs(s.v.face_values[f.id] - ex.v(f.barycenter, t)));
      }
    };
    solve_transient(spec, disc, TimeGrid::with_step(1.0, 0.05), NewtonConfig{}, opt);
  }
  report(worst <= 1e-8, "affine exactness", "max deviation " + fmt(worst) + " over 20 steps, n<=32");
}

void geometry() {
  double closed = 0, stokes = 0, partition = 0;
  for (std::size_t n : {1, 2, 4, 8, 16, 32, 64}) {
    const PolytopalMesh mesh = build_structured_triangular(n);
    const ValidationReport v = validate(mesh);
    closed = std::max(closed, v.closedness_defect);
    stokes = std::max(stokes, v.stokes_defect);
    const HmmDiscretisation disc(mesh);
    for (const auto& c : mesh.cells()) {
      double s = 0;
      for (std::size_t j = 0; j < c.num_faces(); ++j) s += disc.diamond_volume(disc.diamond_offset(c.id) + j);
      partition = std::max(partition, std::abs(s - c.measure));
    }
  }
  report(closed <= 1e-12 && stokes <= 1e-12 && partition <= 1e-12, "geometry identities",
         "closedness " + fmt(closed) + ", Stokes " + fmt(stokes) + ", partition " + fmt(partition));
}

void gdm_trends() {
  std::vector<double> cd, sd, wx, wc;
  for (std::size_t n : {4, 8, 16}) {
    const PolytopalMesh mesh = build_structured_triangular(n);
    const HmmDiscretisation disc(mesh);
    const InteriorGram gram(disc);
    cd.push_back(coercivity_constant(disc).value);
    sd.push_back(consistency_defect(disc, sample_function("sinsin")));
    wx.push_back(limit_conformity_defect(gram, disc, sample_flux("x_axis")));
    wc.push_back(limit_conformity_defect(gram, disc, sample_flux("constant")));
  }
  const double cd_factor = *std::max_element(cd.begin(), cd.end()) / *std::min_element(cd.begin(), cd.end());
  const bool s_ok = in(sd[1] / sd[0], 0.4, 0.7) && in(sd[2] / sd[1], 0.4, 0.7);
  const bool w_ok = wx[1] < wx[0] && wx[2] < wx[1];
  const double wc_max = *std::max_element(wc.begin(), wc.end());
  report(cd_factor < 2.0 && s_ok && w_ok && wc_max <= 1e-10, "GDM property trends",
         "C_D factor " + fmt(cd_factor) + ", S_D ratios " + fmt(sd[1] / sd[0]) + " " +
             fmt(sd[2] / sd[1]) + ", W_D(x,0) " + fmt(wx[0]) + ">" + fmt(wx[1]) + ">" + fmt(wx[2]) +
             ", W_D(const) " + fmt(wc_max));
}

void jacobian_check() {
  const PolytopalMesh mesh = build_structured_triangular(3);
  const HmmDiscretisation disc(mesh);
  const ProblemSpec spec = problem_from_exact(brusselator_exact(), 0.25, 0.25, brusselator({0.0, 1.0}));
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  const std::size_t n0 = disc.num_interior_dofs();
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    SpeciesPair st{DiscreteVector::zeros(mesh), DiscreteVector::zeros(mesh)};
    for (auto* p : {&st.u, &st.v}) {
      for (auto& x : p->cell_values) x = U(rng);
      for (auto& x : p->face_values) x = U(rng);
    }
    const double dt = 1e-3;
    const Eigen::MatrixXd J(assemble_jacobian(disc, st, spec, dt));
    Eigen::VectorXd xu = disc.to_full(st.u), xv = disc.to_full(st.v);
    for (std::size_t col = 0; col < 2 * n0; ++col) {
      const std::size_t dof = disc.interior_dofs()[col % n0];
      Eigen::VectorXd& x = col < n0 ? xu : xv;
      const double h = 1e-6;
      const double keep = x[static_cast<Eigen::Index>(dof)];
      x[static_cast<Eigen::Index>(dof)] = keep + h;
      const Eigen::VectorXd rp = assemble_residual(disc, {disc.from_full(xu), disc.from_full(xv)}, st, spec, dt);
      x[static_cast<Eigen::Index>(dof)] = keep - h;
      const Eigen::VectorXd rm = assemble_residual(disc, {disc.from_full(xu), disc.from_full(xv)}, st, spec, dt);
      x[static_cast<Eigen::Index>(dof)] = keep;
      const Eigen::VectorXd fd = (rp - rm) / (2 * h);
      for (Eigen::Index row = 0; row < fd.size(); ++row) {
        const double a = J(row, static_cast<Eigen::Index>(col));
        worst = std::max(worst, std::abs(a - fd[row]) / std::max(1.0, std::abs(a)));
      }
    }
  }
  report(worst <= 1e-5, "Jacobian vs finite diff", "max relative mismatch " + fmt(worst));
}

void exact_residual() {
  // ∂t u = -u/2, Δu = 2u, ∂t v = v/2, Δv = 2v for the manufactured pair
  const ExactSolution ex = brusselator_exact();
  const KineticsModel k = brusselator({0.0, 1.0});
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Point x(U(rng), U(rng));
    const double t = U(rng);
    const double u = ex.u(x, t), v = ex.v(x, t);
    worst = std::max(worst, std::abs(-0.5 * u - 0.25 * 2.0 * u - k.F(u, v)));
    worst = std::max(worst, std::abs(0.5 * v - 0.25 * 2.0 * v - k.G(u, v)) / std::max(1.0, v));
  }
  report(worst <= 1e-12, "exact-solution residual", "max " + fmt(worst) + " at 100 points");
}

}  // namespace

int main() {
  try {
    exact_residual();
    rate_arithmetic();
    geometry();
    affine_exactness();
    gdm_trends();
    jacobian_check();
    rate_criteria();
  } catch (const std::exception& e) {
    std::printf("FAIL  aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%s: %d criterion check(s) failed\n", g_failures ? "FAILED" : "OK", g_failures);
  return g_failures ? 1 : 0;
}
