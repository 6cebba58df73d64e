#include "hmmrd/mesh.hpp"

#include "hmmrd/hash.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <utility>

namespace hmmrd {

namespace {

constexpr double kDegenerateArea = 1e-14;

Point outward_normal(const Point& a, const Point& b) {
  const Point e = b - a;
  return Point(e.y(), -e.x()) / e.norm();
}

void compute_cell_distances(Cell& cell, const std::vector<Face>& faces) {
  cell.distances.resize(cell.num_faces());
  for (std::size_t i = 0; i < cell.num_faces(); ++i) {
    const Face& f = faces[cell.face_ids[i]];
    cell.distances[i] = (f.barycenter - cell.center).dot(cell.normals[i]);
  }
}

}  // namespace

PolytopalMesh::PolytopalMesh(std::vector<Point> vertices,
                             std::vector<std::vector<std::size_t>> cells) {
  vertices_.reserve(vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    vertices_.push_back(Vertex{i, vertices[i]});
  }

  std::map<std::pair<std::size_t, std::size_t>, std::size_t> face_index;
  cells_.reserve(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto& ids = cells[k];
    if (ids.size() < 3) {
      throw MeshError("cell " + std::to_string(k) + " has fewer than 3 vertices");
    }
    for (std::size_t id : ids) {
      if (id >= vertices_.size()) {
        throw MeshError("cell " + std::to_string(k) + " references vertex " +
                        std::to_string(id) + " which does not exist");
      }
    }

    Cell cell;
    cell.id = k;
    cell.vertex_ids = ids;

    // Shoelace area and centroid.
    double twice_area = 0.0;
    Point moment = Point::Zero();
    const std::size_t nv = ids.size();
    for (std::size_t i = 0; i < nv; ++i) {
      const Point& a = vertices_[ids[i]].position;
      const Point& b = vertices_[ids[(i + 1) % nv]].position;
      const double cross = a.x() * b.y() - b.x() * a.y();
      twice_area += cross;
      moment += cross * (a + b);
    }
    cell.measure = 0.5 * twice_area;
    if (!(cell.measure > kDegenerateArea)) {
      throw MeshError("cell " + std::to_string(k) +
                      " is degenerate or clockwise (signed area " +
                      std::to_string(cell.measure) + ")");
    }
    cell.center = moment / (3.0 * twice_area);

    for (std::size_t i = 0; i < nv; ++i) {
      for (std::size_t j = i + 1; j < nv; ++j) {
        cell.diameter = std::max(
            cell.diameter,
            (vertices_[ids[i]].position - vertices_[ids[j]].position).norm());
      }
    }

    for (std::size_t i = 0; i < nv; ++i) {
      const std::size_t va = ids[i];
      const std::size_t vb = ids[(i + 1) % nv];
      if (va == vb) {
        throw MeshError("cell " + std::to_string(k) + " repeats vertex " +
                        std::to_string(va));
      }
      const auto key = std::minmax(va, vb);
      auto [it, inserted] = face_index.try_emplace(key, faces_.size());
      if (inserted) {
        Face f;
        f.id = faces_.size();
        f.vertex_ids = {key.first, key.second};
        const Point& a = vertices_[key.first].position;
        const Point& b = vertices_[key.second].position;
        f.measure = (b - a).norm();
        f.barycenter = 0.5 * (a + b);
        faces_.push_back(std::move(f));
      }
      Face& f = faces_[it->second];
      if (f.cell_ids.size() == 2) {
        throw MeshError("face (" + std::to_string(key.first) + ", " +
                        std::to_string(key.second) +
                        ") is shared by more than two cells");
      }
      if (!f.cell_ids.empty() && f.cell_ids.front() == k) {
        throw MeshError("cell " + std::to_string(k) + " lists face (" +
                        std::to_string(key.first) + ", " +
                        std::to_string(key.second) + ") twice");
      }
      f.cell_ids.push_back(k);
      cell.face_ids.push_back(it->second);
      cell.normals.push_back(outward_normal(vertices_[va].position,
                                            vertices_[vb].position));
    }
    compute_cell_distances(cell, faces_);
    h_ = std::max(h_, cell.diameter);
    cells_.push_back(std::move(cell));
  }

  for (Face& f : faces_) {
    f.is_boundary = f.cell_ids.size() == 1;
  }
}

std::size_t PolytopalMesh::num_boundary_faces() const {
  return static_cast<std::size_t>(std::count_if(
      faces_.begin(), faces_.end(), [](const Face& f) { return f.is_boundary; }));
}

PolytopalMesh PolytopalMesh::with_cell_center(std::size_t cell,
                                              const Point& center) const {
  PolytopalMesh copy = *this;
  Cell& c = copy.cells_.at(cell);
  c.center = center;
  compute_cell_distances(c, copy.faces_);
  return copy;
}

PolytopalMesh build_structured_triangular(std::size_t n) {
  if (n == 0) {
    throw MeshError("structured mesh level must be at least 1");
  }
  const double step = 1.0 / static_cast<double>(n);
  std::vector<Point> vertices;
  vertices.reserve((n + 1) * (n + 1));
  for (std::size_t j = 0; j <= n; ++j) {
    for (std::size_t i = 0; i <= n; ++i) {
      vertices.emplace_back(i * step, j * step);
    }
  }
  auto vid = [n](std::size_t i, std::size_t j) { return j * (n + 1) + i; };

  std::vector<std::vector<std::size_t>> cells;
  cells.reserve(2 * n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t ll = vid(i, j), lr = vid(i + 1, j);
      const std::size_t ul = vid(i, j + 1), ur = vid(i + 1, j + 1);
      cells.push_back({ll, lr, ur});
      cells.push_back({ll, ur, ul});
    }
  }
  return PolytopalMesh(std::move(vertices), std::move(cells));
}

PolytopalMesh load_mesh(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;

  // Returns the next non-empty, comment-stripped line.
  auto next_line = [&](std::string& out) -> bool {
    while (std::getline(in, raw)) {
      ++line_no;
      if (auto pos = raw.find('#'); pos != std::string::npos) raw.erase(pos);
      if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
      out = raw;
      return true;
    }
    return false;
  };
  auto fail = [&](const std::string& what) -> MeshError {
    return MeshError("line " + std::to_string(line_no) + ": " + what);
  };
  auto read_header = [&](const std::string& keyword) -> std::size_t {
    std::string line;
    if (!next_line(line)) throw fail("expected '" + keyword + " <count>'");
    std::istringstream ls(line);
    std::string word;
    long long count = -1;
    std::string extra;
    if (!(ls >> word >> count) || word != keyword || count < 0 || (ls >> extra)) {
      throw fail("expected '" + keyword + " <count>'");
    }
    return static_cast<std::size_t>(count);
  };

  const std::size_t nv = read_header("vertices");
  std::vector<Point> vertices;
  vertices.reserve(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    std::string line, extra;
    if (!next_line(line)) throw fail("unexpected end of input in vertex block");
    std::istringstream ls(line);
    double x = 0.0, y = 0.0;
    if (!(ls >> x >> y) || (ls >> extra)) throw fail("expected 'x y'");
    vertices.emplace_back(x, y);
  }

  const std::size_t nc = read_header("cells");
  std::vector<std::vector<std::size_t>> cells;
  cells.reserve(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    std::string line, extra;
    if (!next_line(line)) throw fail("unexpected end of input in cell block");
    std::istringstream ls(line);
    long long k = 0;
    if (!(ls >> k) || k < 3) throw fail("expected vertex count >= 3");
    std::vector<std::size_t> ids;
    for (long long i = 0; i < k; ++i) {
      long long id = -1;
      if (!(ls >> id)) throw fail("expected " + std::to_string(k) + " vertex ids");
      if (id < 0 || static_cast<std::size_t>(id) >= nv) {
        throw fail("vertex id " + std::to_string(id) + " out of range");
      }
      ids.push_back(static_cast<std::size_t>(id));
    }
    if (ls >> extra) throw fail("trailing tokens after cell connectivity");
    cells.push_back(std::move(ids));
  }
  std::string line;
  if (next_line(line)) throw fail("trailing content after cell block");

  return PolytopalMesh(std::move(vertices), std::move(cells));
}

PolytopalMesh load_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_mesh(buffer.str());
}

std::string write_mesh(const PolytopalMesh& mesh) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "vertices " << mesh.num_vertices() << '\n';
  for (const Vertex& v : mesh.vertices()) {
    out << v.position.x() << ' ' << v.position.y() << '\n';
  }
  out << "cells " << mesh.num_cells() << '\n';
  for (const Cell& c : mesh.cells()) {
    out << c.vertex_ids.size();
    for (std::size_t id : c.vertex_ids) out << ' ' << id;
    out << '\n';
  }
  return out.str();
}

bool ValidationReport::ok(double tol) const {
  return closedness_defect <= tol && stokes_defect <= tol &&
         volume_defect <= tol && min_distance > 0.0 && euler_ok;
}

ValidationReport validate(const PolytopalMesh& mesh) {
  ValidationReport report;
  report.min_distance = std::numeric_limits<double>::infinity();
  for (const Cell& c : mesh.cells()) {
    Point closure = Point::Zero();
    Eigen::Matrix2d stokes = -c.measure * Eigen::Matrix2d::Identity();
    double volume = -2.0 * c.measure;
    for (std::size_t i = 0; i < c.num_faces(); ++i) {
      const Face& f = mesh.face(c.face_ids[i]);
      closure += f.measure * c.normals[i];
      stokes += f.measure * c.normals[i] * (f.barycenter - c.center).transpose();
      volume += f.measure * c.distances[i];
      report.min_distance = std::min(report.min_distance, c.distances[i]);
    }
    report.closedness_defect = std::max(report.closedness_defect, closure.norm());
    report.stokes_defect = std::max(report.stokes_defect, stokes.norm());
    report.volume_defect = std::max(report.volume_defect, std::abs(volume));
    report.total_area += c.measure;
  }
  report.euler_characteristic = static_cast<long>(mesh.num_vertices()) -
                                static_cast<long>(mesh.num_faces()) +
                                static_cast<long>(mesh.num_cells());
  report.euler_ok = report.euler_characteristic == 1;
  return report;
}

double mesh_size(const PolytopalMesh& mesh) {
  double h = 0.0;
  for (const Cell& c : mesh.cells()) h = std::max(h, c.diameter);
  return h;
}

std::uint64_t mesh_checksum(const PolytopalMesh& mesh) {
  Fnv1a hash;
  for (const Vertex& v : mesh.vertices()) {
    const double xy[2] = {v.position.x(), v.position.y()};
    hash.update(xy, sizeof(xy));
  }
  for (const Cell& c : mesh.cells()) {
    const std::uint64_t k = c.vertex_ids.size();
    hash.update(&k, sizeof(k));
    for (std::size_t id : c.vertex_ids) {
      const std::uint64_t v = id;
      hash.update(&v, sizeof(v));
    }
  }
  return hash.digest();
}

}  // namespace hmmrd
