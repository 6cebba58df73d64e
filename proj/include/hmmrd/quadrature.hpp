// Quadrature on cells, diamonds and faces.

#pragma once

#include "hmmrd/mesh.hpp"

#include <functional>

namespace hmmrd {

using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Point(const Point&)>;

/// Cells and diamonds wider than this are integrated compositely: the
/// degree-4 triangle rule is applied on a uniform k×k sub-triangulation
/// whose pieces are no wider than this.
inline constexpr double kMaxQuadratureDiameter = 0.18;

/// Degree-4 six-point symmetric rule on triangle (a, b, c), applied
/// compositely when the triangle is wider than kMaxQuadratureDiameter.
/// `f` receives each quadrature point and its weight (weights sum to the
/// triangle area).
void for_each_triangle_point(const Point& a, const Point& b, const Point& c,
                             const std::function<void(const Point&, double)>& f);

double integrate_triangle(const Point& a, const Point& b, const Point& c,
                          const ScalarField& f);

/// Integral over a cell, fanned into triangles from the cell centre.
double integrate_cell(const PolytopalMesh& mesh, std::size_t cell,
                      const ScalarField& f);

/// Two-point Gauss rule on the segment [a, b].
double integrate_segment(const Point& a, const Point& b, const ScalarField& f);

}  // namespace hmmrd
