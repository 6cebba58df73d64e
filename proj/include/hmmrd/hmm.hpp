// Hybrid mimetic mixed (HMM) gradient discretisation on polytopal meshes.
//
// Unknowns are one value per cell and one per face. Global degrees of
// freedom are laid out cells first, then faces:
//
//   [ φ_K for K in cells | φ_σ for σ in faces ]
//
// The homogeneous-Dirichlet subspace X_{D,0} drops the boundary faces and
// keeps the order: [ cells | interior faces ]. A cell keeps the same index
// in both layouts.

#pragma once

#include "hmmrd/mesh.hpp"
#include "hmmrd/quadrature.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstddef>
#include <functional>
#include <vector>

namespace hmmrd {

using SpaceTimeField = std::function<double(const Point&, double)>;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// An element of X_D.
struct DiscreteVector {
  Eigen::VectorXd cell_values;
  Eigen::VectorXd face_values;

  static DiscreteVector zeros(const PolytopalMesh& mesh) {
    return {Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_cells())),
            Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_faces()))};
  }
};

/// One gradient vector per (cell, face) diamond, ordered cell by cell and
/// within a cell in the cell's face order.
using DiamondField = std::vector<Point>;

class HmmDiscretisation {
 public:
  /// 2 × (1 + |F_K|) map from the local unknowns (φ_K, φ_σ1, ..., φ_σn)
  /// to the gradient on one diamond.
  using LocalGradient = Eigen::Matrix<double, 2, Eigen::Dynamic>;

  /// `mesh` must outlive the discretisation.
  explicit HmmDiscretisation(const PolytopalMesh& mesh);

  const PolytopalMesh& mesh() const { return *mesh_; }

  // Degree-of-freedom bookkeeping.
  std::size_t num_cells() const { return mesh_->num_cells(); }
  std::size_t num_dofs() const { return mesh_->num_cells() + mesh_->num_faces(); }
  std::size_t num_interior_dofs() const { return interior_to_full_.size(); }
  std::size_t face_dof(std::size_t face) const { return mesh_->num_cells() + face; }
  /// Position of a full dof in the X_{D,0} layout, or -1 for boundary faces.
  std::ptrdiff_t interior_index(std::size_t full_dof) const {
    return full_to_interior_[full_dof];
  }
  const std::vector<std::size_t>& interior_dofs() const { return interior_to_full_; }
  const std::vector<std::size_t>& boundary_faces() const { return boundary_faces_; }

  Eigen::VectorXd to_full(const DiscreteVector& phi) const;
  DiscreteVector from_full(const Eigen::VectorXd& x) const;
  /// Values on the X_{D,0} unknowns (boundary faces dropped).
  Eigen::VectorXd restrict_interior(const DiscreteVector& phi) const;
  /// Element of X_{D,0} from its interior unknowns; boundary faces are 0.
  DiscreteVector extend_interior(const Eigen::VectorXd& x) const;

  // Geometry of the diamonds D_{K,σ}.
  std::size_t num_diamonds() const { return diamond_volume_.size(); }
  std::size_t diamond_offset(std::size_t cell) const { return offsets_[cell]; }
  double diamond_volume(std::size_t diamond) const { return diamond_volume_[diamond]; }
  /// √d / d_{K,σ}
  double stabilisation_coefficient(std::size_t diamond) const { return stab_coef_[diamond]; }
  const LocalGradient& local_gradient(std::size_t diamond) const { return local_grad_[diamond]; }
  /// Full-layout dofs touched by cell K: K itself followed by its faces.
  std::vector<std::size_t> local_dofs(std::size_t cell) const;

  // Reconstructions.
  Point cell_gradient(const DiscreteVector& phi, std::size_t cell) const;
  Eigen::VectorXd stabilisation(const DiscreteVector& phi, std::size_t cell) const;
  DiamondField reconstruct_gradient(const DiscreteVector& phi) const;
  /// Π_D φ as one constant per cell.
  Eigen::VectorXd reconstruct_function(const DiscreteVector& phi) const;

  double function_norm(const DiscreteVector& phi) const;
  double gradient_norm(const DiscreteVector& phi) const;
  double field_norm(const DiamondField& field) const;

  // Interpolants.
  /// J_D: quadrature cell means, all face values 0.
  DiscreteVector interpolate_initial(const ScalarField& w) const;
  /// Boundary face means of g(·, t) by two-point Gauss, indexed like
  /// boundary_faces().
  Eigen::VectorXd interpolate_boundary(const SpaceTimeField& g, double t) const;
  /// Overwrites the boundary face values of `phi` with I_{D,∂} g(·, t).
  void apply_boundary(const SpaceTimeField& g, double t, DiscreteVector& phi) const;

  // Matrices on the full dof layout.
  std::vector<Triplet> diffusion_triplets(double mu) const;
  /// A_ij = μ ∫ ∇_D e_i · ∇_D e_j.
  SparseMatrix assemble_diffusion(double mu) const;
  /// Diagonal of the Π_D Gram matrix restricted to cell unknowns: |K|.
  Eigen::VectorXd assemble_mass() const;

  /// Symmetric restriction of a full-layout matrix to X_{D,0}.
  SparseMatrix restrict_to_interior(const SparseMatrix& full) const;

 private:
  const PolytopalMesh* mesh_;
  std::vector<std::size_t> offsets_;
  std::vector<double> diamond_volume_;
  std::vector<double> stab_coef_;
  std::vector<LocalGradient> local_grad_;
  std::vector<Eigen::MatrixXd> local_stiffness_;
  std::vector<std::ptrdiff_t> full_to_interior_;
  std::vector<std::size_t> interior_to_full_;
  std::vector<std::size_t> boundary_faces_;
};

}  // namespace hmmrd
