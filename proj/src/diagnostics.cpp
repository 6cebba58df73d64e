#include "hmmrd/diagnostics.hpp"

#include <cmath>
#include <numbers>

namespace hmmrd {

namespace {

constexpr double kSolveTol = 1e-12;

Point vertex_position(const PolytopalMesh& mesh, const Face& f, int i) {
  return mesh.vertex(f.vertex_ids[static_cast<std::size_t>(i)]).position;
}

}  // namespace

InteriorGram::InteriorGram(const HmmDiscretisation& disc)
    : a_(disc.restrict_to_interior(disc.assemble_diffusion(1.0))) {
  ldlt_.compute(a_);
  if (ldlt_.info() != Eigen::Success) {
    throw DiagnosticsError("gradient Gram matrix is not positive definite on X_{D,0}");
  }
}

Eigen::VectorXd InteriorGram::solve(const Eigen::VectorXd& b) const {
  Eigen::VectorXd x = ldlt_.solve(b);
  const double scale = b.norm();
  if (scale == 0.0) return x;
  double rel = (b - a_ * x).norm() / scale;
  if (rel > kSolveTol) {
    x += ldlt_.solve(Eigen::VectorXd(b - a_ * x));
    rel = (b - a_ * x).norm() / scale;
  }
  if (!(rel <= kSolveTol)) {
    throw DiagnosticsError("Gram solve relative residual " + std::to_string(rel) +
                           " exceeds 1e-12");
  }
  return x;
}

double InteriorGram::dual_norm(const Eigen::VectorXd& b) const {
  if (b.isZero(0.0)) return 0.0;
  return std::sqrt(std::max(0.0, b.dot(solve(b))));
}

CoercivityResult coercivity_constant(const HmmDiscretisation& disc, double tol,
                                     int max_iter) {
  const InteriorGram gram(disc);
  const std::size_t nc = disc.num_cells();
  const auto n0 = static_cast<Eigen::Index>(disc.num_interior_dofs());
  const Eigen::VectorXd mass = disc.assemble_mass();

  auto apply_mass = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n0);
    for (std::size_t k = 0; k < nc; ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      y[i] = mass[i] * x[i];
    }
    return y;
  };

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n0);
  x.head(static_cast<Eigen::Index>(nc)).setOnes();
  x.normalize();

  double lambda = 0.0;
  for (int iter = 1; iter <= max_iter; ++iter) {
    Eigen::VectorXd y = gram.solve(apply_mass(x));
    y.normalize();
    const double next = y.dot(apply_mass(y)) / y.dot(gram.matrix() * y);
    x = std::move(y);
    if (std::abs(next - lambda) <= tol * next) {
      return {std::sqrt(next), disc.extend_interior(x), iter};
    }
    lambda = next;
  }
  throw DiagnosticsError("power iteration for C_D did not converge in " +
                         std::to_string(max_iter) + " iterations");
}

double consistency_defect(const HmmDiscretisation& disc, const SmoothFunction& phi) {
  const PolytopalMesh& mesh = disc.mesh();
  DiscreteVector w = disc.interpolate_initial(phi.value);
  for (const Face& f : mesh.faces()) {
    w.face_values[static_cast<Eigen::Index>(f.id)] =
        integrate_segment(vertex_position(mesh, f, 0), vertex_position(mesh, f, 1),
                          phi.value) /
        f.measure;
  }
  const DiamondField grad = disc.reconstruct_gradient(w);

  double value_sq = 0.0;
  double grad_sq = 0.0;
  for (const Cell& c : mesh.cells()) {
    const double wk = w.cell_values[static_cast<Eigen::Index>(c.id)];
    value_sq += integrate_cell(mesh, c.id, [&](const Point& x) {
      const double e = wk - phi.value(x);
      return e * e;
    });
    for (std::size_t j = 0; j < c.num_faces(); ++j) {
      const Face& f = mesh.face(c.face_ids[j]);
      const Point& g = grad[disc.diamond_offset(c.id) + j];
      grad_sq += integrate_triangle(c.center, vertex_position(mesh, f, 0),
                                    vertex_position(mesh, f, 1), [&](const Point& x) {
                                      return (g - phi.gradient(x)).squaredNorm();
                                    });
    }
  }
  return std::sqrt(value_sq) + std::sqrt(grad_sq);
}

Eigen::VectorXd limit_conformity_load(const HmmDiscretisation& disc, const SmoothFlux& psi) {
  const PolytopalMesh& mesh = disc.mesh();
  Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(disc.num_dofs()));
  for (const Cell& c : mesh.cells()) {
    const auto dofs = disc.local_dofs(c.id);
    full[static_cast<Eigen::Index>(c.id)] += integrate_cell(mesh, c.id, psi.divergence);
    for (std::size_t j = 0; j < c.num_faces(); ++j) {
      const Face& f = mesh.face(c.face_ids[j]);
      Point flux = Point::Zero();
      for_each_triangle_point(c.center, vertex_position(mesh, f, 0),
                              vertex_position(mesh, f, 1),
                              [&](const Point& x, double wq) { flux += wq * psi.value(x); });
      const auto& G = disc.local_gradient(disc.diamond_offset(c.id) + j);
      for (std::size_t a = 0; a < dofs.size(); ++a) {
        full[static_cast<Eigen::Index>(dofs[a])] +=
            G.col(static_cast<Eigen::Index>(a)).dot(flux);
      }
    }
  }
  Eigen::VectorXd b(static_cast<Eigen::Index>(disc.num_interior_dofs()));
  const auto& interior = disc.interior_dofs();
  for (std::size_t i = 0; i < interior.size(); ++i) {
    b[static_cast<Eigen::Index>(i)] = full[static_cast<Eigen::Index>(interior[i])];
  }
  return b;
}

double limit_conformity_defect(const InteriorGram& gram, const HmmDiscretisation& disc,
                               const SmoothFlux& psi) {
  return gram.dual_norm(limit_conformity_load(disc, psi));
}

double limit_conformity_defect(const HmmDiscretisation& disc, const SmoothFlux& psi) {
  return limit_conformity_defect(InteriorGram(disc), disc, psi);
}

double dual_norm(const InteriorGram& gram, const HmmDiscretisation& disc,
                 const Eigen::VectorXd& cell_values) {
  const auto nc = static_cast<Eigen::Index>(disc.num_cells());
  if (cell_values.size() != nc) {
    throw DiagnosticsError("dual_norm expects one value per cell");
  }
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(disc.num_interior_dofs()));
  c.head(nc) = disc.assemble_mass().cwiseProduct(cell_values);
  return gram.dual_norm(c);
}

double dual_norm(const HmmDiscretisation& disc, const Eigen::VectorXd& cell_values) {
  return dual_norm(InteriorGram(disc), disc, cell_values);
}

SmoothFunction sample_function(const std::string& label) {
  using std::numbers::pi;
  if (label == "sinsin") {
    return {[](const Point& x) { return std::sin(pi * x.x()) * std::sin(pi * x.y()); },
            [](const Point& x) {
              return Point(pi * std::cos(pi * x.x()) * std::sin(pi * x.y()),
                           pi * std::sin(pi * x.x()) * std::cos(pi * x.y()));
            }};
  }
  if (label == "constant") {
    return {[](const Point&) { return 1.0; }, [](const Point&) { return Point(0.0, 0.0); }};
  }
  if (label == "affine") {
    return {[](const Point& x) { return 0.5 + 2.0 * x.x() - x.y(); },
            [](const Point&) { return Point(2.0, -1.0); }};
  }
  throw DiagnosticsError("unknown sample function '" + label + "'");
}

SmoothFlux sample_flux(const std::string& label) {
  if (label == "x_axis") {
    return {[](const Point& x) { return Point(x.x(), 0.0); },
            [](const Point&) { return 1.0; }};
  }
  if (label == "constant") {
    return {[](const Point&) { return Point(1.0, -0.5); }, [](const Point&) { return 0.0; }};
  }
  throw DiagnosticsError("unknown sample flux '" + label + "'");
}

std::vector<std::string> sample_function_labels() { return {"sinsin", "constant", "affine"}; }
std::vector<std::string> sample_flux_labels() { return {"x_axis", "constant"}; }

GdmQualityReport quality_report(const HmmDiscretisation& disc,
                                const std::vector<std::string>& function_labels,
                                const std::vector<std::string>& flux_labels) {
  GdmQualityReport report;
  report.h = disc.mesh().h();
  report.coercivity = coercivity_constant(disc).value;
  for (const auto& label : function_labels) {
    report.consistency.emplace_back(label, consistency_defect(disc, sample_function(label)));
  }
  const InteriorGram gram(disc);
  for (const auto& label : flux_labels) {
    report.limit_conformity.emplace_back(label,
                                         limit_conformity_defect(gram, disc, sample_flux(label)));
  }
  return report;
}

}  // namespace hmmrd
