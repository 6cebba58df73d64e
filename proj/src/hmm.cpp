#include "hmmrd/hmm.hpp"

#include <cmath>

namespace hmmrd {

namespace {
constexpr double kDimension = 2.0;
}

HmmDiscretisation::HmmDiscretisation(const PolytopalMesh& mesh) : mesh_(&mesh) {
  const std::size_t nc = mesh.num_cells();
  offsets_.resize(nc + 1, 0);
  for (std::size_t k = 0; k < nc; ++k) {
    offsets_[k + 1] = offsets_[k] + mesh.cell(k).num_faces();
  }
  const std::size_t nd = offsets_.back();
  diamond_volume_.resize(nd);
  stab_coef_.resize(nd);
  local_grad_.resize(nd);
  local_stiffness_.resize(nc);

  const double sqrt_d = std::sqrt(kDimension);
  for (std::size_t k = 0; k < nc; ++k) {
    const Cell& cell = mesh.cell(k);
    const Eigen::Index nf = static_cast<Eigen::Index>(cell.num_faces());

    // ∇_K φ = Σ_j g_j φ_σj with g_j = |σ_j| n_j / |K|.
    std::vector<Point> g(cell.num_faces());
    for (std::size_t j = 0; j < cell.num_faces(); ++j) {
      g[j] = mesh.face(cell.face_ids[j]).measure * cell.normals[j] / cell.measure;
    }

    Eigen::MatrixXd stiffness = Eigen::MatrixXd::Zero(nf + 1, nf + 1);
    for (std::size_t i = 0; i < cell.num_faces(); ++i) {
      const std::size_t dm = offsets_[k] + i;
      const Face& face = mesh.face(cell.face_ids[i]);
      diamond_volume_[dm] = face.measure * cell.distances[i] / kDimension;
      stab_coef_[dm] = sqrt_d / cell.distances[i];

      const Point& n = cell.normals[i];
      const Point offset = face.barycenter - cell.center;
      LocalGradient G(2, nf + 1);
      // R_{K,σi} = φ_σi - φ_K - ∇_K φ · (x_σi - x_K)
      G.col(0) = -stab_coef_[dm] * n;
      for (std::size_t j = 0; j < cell.num_faces(); ++j) {
        const double r = (i == j ? 1.0 : 0.0) - g[j].dot(offset);
        G.col(static_cast<Eigen::Index>(j) + 1) = g[j] + stab_coef_[dm] * r * n;
      }
      stiffness.noalias() += diamond_volume_[dm] * G.transpose() * G;
      local_grad_[dm] = std::move(G);
    }
    local_stiffness_[k] = std::move(stiffness);
  }

  const std::size_t nf = mesh.num_faces();
  full_to_interior_.assign(nc + nf, -1);
  interior_to_full_.reserve(nc + mesh.num_interior_faces());
  for (std::size_t k = 0; k < nc; ++k) {
    full_to_interior_[k] = static_cast<std::ptrdiff_t>(interior_to_full_.size());
    interior_to_full_.push_back(k);
  }
  for (std::size_t f = 0; f < nf; ++f) {
    if (mesh.face(f).is_boundary) {
      boundary_faces_.push_back(f);
    } else {
      full_to_interior_[nc + f] = static_cast<std::ptrdiff_t>(interior_to_full_.size());
      interior_to_full_.push_back(nc + f);
    }
  }
}

Eigen::VectorXd HmmDiscretisation::to_full(const DiscreteVector& phi) const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(num_dofs()));
  x << phi.cell_values, phi.face_values;
  return x;
}

DiscreteVector HmmDiscretisation::from_full(const Eigen::VectorXd& x) const {
  const auto nc = static_cast<Eigen::Index>(mesh_->num_cells());
  const auto nf = static_cast<Eigen::Index>(mesh_->num_faces());
  return {x.head(nc), x.segment(nc, nf)};
}

Eigen::VectorXd HmmDiscretisation::restrict_interior(const DiscreteVector& phi) const {
  const std::size_t nc = mesh_->num_cells();
  Eigen::VectorXd x(static_cast<Eigen::Index>(num_interior_dofs()));
  for (std::size_t i = 0; i < interior_to_full_.size(); ++i) {
    const std::size_t dof = interior_to_full_[i];
    x[static_cast<Eigen::Index>(i)] =
        dof < nc ? phi.cell_values[static_cast<Eigen::Index>(dof)]
                 : phi.face_values[static_cast<Eigen::Index>(dof - nc)];
  }
  return x;
}

DiscreteVector HmmDiscretisation::extend_interior(const Eigen::VectorXd& x) const {
  const std::size_t nc = mesh_->num_cells();
  DiscreteVector phi = DiscreteVector::zeros(*mesh_);
  for (std::size_t i = 0; i < interior_to_full_.size(); ++i) {
    const std::size_t dof = interior_to_full_[i];
    const double value = x[static_cast<Eigen::Index>(i)];
    if (dof < nc) {
      phi.cell_values[static_cast<Eigen::Index>(dof)] = value;
    } else {
      phi.face_values[static_cast<Eigen::Index>(dof - nc)] = value;
    }
  }
  return phi;
}

std::vector<std::size_t> HmmDiscretisation::local_dofs(std::size_t cell) const {
  const Cell& c = mesh_->cell(cell);
  std::vector<std::size_t> dofs;
  dofs.reserve(c.num_faces() + 1);
  dofs.push_back(cell);
  for (std::size_t f : c.face_ids) dofs.push_back(face_dof(f));
  return dofs;
}

Point HmmDiscretisation::cell_gradient(const DiscreteVector& phi, std::size_t cell) const {
  const Cell& c = mesh_->cell(cell);
  Point grad = Point::Zero();
  for (std::size_t j = 0; j < c.num_faces(); ++j) {
    const Face& f = mesh_->face(c.face_ids[j]);
    grad += f.measure * phi.face_values[static_cast<Eigen::Index>(f.id)] * c.normals[j];
  }
  return grad / c.measure;
}

Eigen::VectorXd HmmDiscretisation::stabilisation(const DiscreteVector& phi,
                                                 std::size_t cell) const {
  const Cell& c = mesh_->cell(cell);
  const Point grad = cell_gradient(phi, cell);
  const double phi_k = phi.cell_values[static_cast<Eigen::Index>(cell)];
  Eigen::VectorXd r(static_cast<Eigen::Index>(c.num_faces()));
  for (std::size_t j = 0; j < c.num_faces(); ++j) {
    const Face& f = mesh_->face(c.face_ids[j]);
    r[static_cast<Eigen::Index>(j)] = phi.face_values[static_cast<Eigen::Index>(f.id)] -
                                      phi_k - grad.dot(f.barycenter - c.center);
  }
  return r;
}

DiamondField HmmDiscretisation::reconstruct_gradient(const DiscreteVector& phi) const {
  DiamondField field(num_diamonds());
  for (std::size_t k = 0; k < mesh_->num_cells(); ++k) {
    const Cell& c = mesh_->cell(k);
    const Point grad = cell_gradient(phi, k);
    const Eigen::VectorXd r = stabilisation(phi, k);
    for (std::size_t j = 0; j < c.num_faces(); ++j) {
      const std::size_t dm = offsets_[k] + j;
      field[dm] = grad + stab_coef_[dm] * r[static_cast<Eigen::Index>(j)] * c.normals[j];
    }
  }
  return field;
}

Eigen::VectorXd HmmDiscretisation::reconstruct_function(const DiscreteVector& phi) const {
  return phi.cell_values;
}

double HmmDiscretisation::function_norm(const DiscreteVector& phi) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < mesh_->num_cells(); ++k) {
    const double v = phi.cell_values[static_cast<Eigen::Index>(k)];
    sum += mesh_->cell(k).measure * v * v;
  }
  return std::sqrt(sum);
}

double HmmDiscretisation::field_norm(const DiamondField& field) const {
  double sum = 0.0;
  for (std::size_t dm = 0; dm < field.size(); ++dm) {
    sum += diamond_volume_[dm] * field[dm].squaredNorm();
  }
  return std::sqrt(sum);
}

double HmmDiscretisation::gradient_norm(const DiscreteVector& phi) const {
  return field_norm(reconstruct_gradient(phi));
}

DiscreteVector HmmDiscretisation::interpolate_initial(const ScalarField& w) const {
  DiscreteVector phi = DiscreteVector::zeros(*mesh_);
  for (std::size_t k = 0; k < mesh_->num_cells(); ++k) {
    phi.cell_values[static_cast<Eigen::Index>(k)] =
        integrate_cell(*mesh_, k, w) / mesh_->cell(k).measure;
  }
  return phi;
}

Eigen::VectorXd HmmDiscretisation::interpolate_boundary(const SpaceTimeField& g,
                                                        double t) const {
  Eigen::VectorXd values(static_cast<Eigen::Index>(boundary_faces_.size()));
  const ScalarField at_t = [&g, t](const Point& x) { return g(x, t); };
  for (std::size_t i = 0; i < boundary_faces_.size(); ++i) {
    const Face& f = mesh_->face(boundary_faces_[i]);
    values[static_cast<Eigen::Index>(i)] =
        integrate_segment(mesh_->vertex(f.vertex_ids[0]).position,
                          mesh_->vertex(f.vertex_ids[1]).position, at_t) /
        f.measure;
  }
  return values;
}

void HmmDiscretisation::apply_boundary(const SpaceTimeField& g, double t,
                                       DiscreteVector& phi) const {
  const Eigen::VectorXd values = interpolate_boundary(g, t);
  for (std::size_t i = 0; i < boundary_faces_.size(); ++i) {
    phi.face_values[static_cast<Eigen::Index>(boundary_faces_[i])] =
        values[static_cast<Eigen::Index>(i)];
  }
}

std::vector<Triplet> HmmDiscretisation::diffusion_triplets(double mu) const {
  std::vector<Triplet> triplets;
  std::size_t count = 0;
  for (const auto& s : local_stiffness_) count += static_cast<std::size_t>(s.size());
  triplets.reserve(count);
  for (std::size_t k = 0; k < mesh_->num_cells(); ++k) {
    const auto dofs = local_dofs(k);
    const Eigen::MatrixXd& s = local_stiffness_[k];
    for (std::size_t a = 0; a < dofs.size(); ++a) {
      for (std::size_t b = 0; b < dofs.size(); ++b) {
        triplets.emplace_back(static_cast<int>(dofs[a]), static_cast<int>(dofs[b]),
                              mu * s(static_cast<Eigen::Index>(a),
                                     static_cast<Eigen::Index>(b)));
      }
    }
  }
  return triplets;
}

SparseMatrix HmmDiscretisation::assemble_diffusion(double mu) const {
  const auto n = static_cast<Eigen::Index>(num_dofs());
  SparseMatrix a(n, n);
  const auto triplets = diffusion_triplets(mu);
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

Eigen::VectorXd HmmDiscretisation::assemble_mass() const {
  Eigen::VectorXd m(static_cast<Eigen::Index>(mesh_->num_cells()));
  for (std::size_t k = 0; k < mesh_->num_cells(); ++k) {
    m[static_cast<Eigen::Index>(k)] = mesh_->cell(k).measure;
  }
  return m;
}

SparseMatrix HmmDiscretisation::restrict_to_interior(const SparseMatrix& full) const {
  const auto n = static_cast<Eigen::Index>(num_interior_dofs());
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(full.nonZeros()));
  for (Eigen::Index col = 0; col < full.outerSize(); ++col) {
    const std::ptrdiff_t jc = full_to_interior_[static_cast<std::size_t>(col)];
    if (jc < 0) continue;
    for (SparseMatrix::InnerIterator it(full, col); it; ++it) {
      const std::ptrdiff_t ir = full_to_interior_[static_cast<std::size_t>(it.row())];
      if (ir < 0) continue;
      triplets.emplace_back(static_cast<int>(ir), static_cast<int>(jc), it.value());
    }
  }
  SparseMatrix out(n, n);
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

}  // namespace hmmrd
