// Polytopal meshes of the unit square and the geometric quantities used by
// the hybrid mimetic mixed discretisation.

#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hmmrd {

using Point = Eigen::Vector2d;

/// Thrown for malformed mesh input, broken topology and degenerate cells.
class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Vertex {
  std::size_t id = 0;
  Point position = Point::Zero();
};

struct Face {
  std::size_t id = 0;
  std::array<std::size_t, 2> vertex_ids{};
  /// One entry for boundary faces, two for interior faces.
  std::vector<std::size_t> cell_ids;
  double measure = 0.0;
  Point barycenter = Point::Zero();
  bool is_boundary = false;
};

/// A polygonal cell. Per-face data (normals, distances) is stored in the
/// same order as `face_ids`; face i joins vertex i and vertex i+1.
struct Cell {
  std::size_t id = 0;
  std::vector<std::size_t> face_ids;
  std::vector<std::size_t> vertex_ids;  // counterclockwise
  double measure = 0.0;
  Point center = Point::Zero();  // centroid
  std::vector<Point> normals;    // outward unit normals n_{K,σ}
  std::vector<double> distances; // d_{K,σ} = (x_σ - x_K)·n_{K,σ}
  double diameter = 0.0;

  std::size_t num_faces() const { return face_ids.size(); }
};

class PolytopalMesh {
 public:
  PolytopalMesh() = default;

  /// Builds faces and geometry from vertex coordinates and counterclockwise
  /// cell connectivity. Throws MeshError on invalid input.
  PolytopalMesh(std::vector<Point> vertices,
                std::vector<std::vector<std::size_t>> cells);

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Face>& faces() const { return faces_; }
  const std::vector<Cell>& cells() const { return cells_; }

  const Vertex& vertex(std::size_t i) const { return vertices_[i]; }
  const Face& face(std::size_t i) const { return faces_[i]; }
  const Cell& cell(std::size_t i) const { return cells_[i]; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_faces() const { return faces_.size(); }
  std::size_t num_cells() const { return cells_.size(); }
  std::size_t num_boundary_faces() const;
  std::size_t num_interior_faces() const {
    return num_faces() - num_boundary_faces();
  }

  /// Maximum cell diameter.
  double h() const { return h_; }

  /// Copy of this mesh with x_K of `cell` moved to `center` and the
  /// cell-face distances recomputed. Used to probe validation.
  PolytopalMesh with_cell_center(std::size_t cell, const Point& center) const;

 private:
  std::vector<Vertex> vertices_;
  std::vector<Face> faces_;
  std::vector<Cell> cells_;
  double h_ = 0.0;
};

/// n×n squares of side 1/n, each split by its lower-left to upper-right
/// diagonal.
PolytopalMesh build_structured_triangular(std::size_t n);

/// Parses the text mesh format:
///   vertices <V>
///   x y            (V lines)
///   cells <C>
///   k i1 ... ik    (C lines, counterclockwise, 0-based)
/// Blank lines and `#` comments are ignored.
PolytopalMesh load_mesh(std::string_view text);
PolytopalMesh load_mesh_file(const std::string& path);

/// Writes `mesh` in the format accepted by load_mesh.
std::string write_mesh(const PolytopalMesh& mesh);

struct ValidationReport {
  double closedness_defect = 0.0;  // max_K |Σ |σ| n_{K,σ}|
  double stokes_defect = 0.0;      // max_K |Σ |σ| n (x_σ - x_K)^T - |K| I|
  double volume_defect = 0.0;      // max_K |Σ |σ| d_{K,σ} - 2|K||
  double min_distance = 0.0;       // min_{K,σ} d_{K,σ}
  double total_area = 0.0;
  long euler_characteristic = 0;   // V - E + C
  bool euler_ok = false;
  bool ok(double tol = 1e-12) const;
};

ValidationReport validate(const PolytopalMesh& mesh);

double mesh_size(const PolytopalMesh& mesh);

/// FNV-1a hash over topology and coordinates; used in run manifests.
std::uint64_t mesh_checksum(const PolytopalMesh& mesh);

}  // namespace hmmrd
