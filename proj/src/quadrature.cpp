#include "hmmrd/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace hmmrd {

namespace {

struct TrianglePoint {
  double l0, l1, l2, weight;
};

// Dunavant degree-4 rule, weights normalised to 1.
constexpr double kA = 0.445948490915965;
constexpr double kB = 0.091576213509771;
constexpr double kWa = 0.223381589678011;
constexpr double kWb = 0.109951743655322;
constexpr std::array<TrianglePoint, 6> kRule{{
    {kA, kA, 1.0 - 2.0 * kA, kWa},
    {kA, 1.0 - 2.0 * kA, kA, kWa},
    {1.0 - 2.0 * kA, kA, kA, kWa},
    {kB, kB, 1.0 - 2.0 * kB, kWb},
    {kB, 1.0 - 2.0 * kB, kB, kWb},
    {1.0 - 2.0 * kB, kB, kB, kWb},
}};

double area(const Point& a, const Point& b, const Point& c) {
  const Point e1 = b - a, e2 = c - a;
  return 0.5 * std::abs(e1.x() * e2.y() - e1.y() * e2.x());
}

void apply_rule(const Point& a, const Point& b, const Point& c,
                const std::function<void(const Point&, double)>& f) {
  const double t = area(a, b, c);
  for (const auto& q : kRule) {
    f(q.l0 * a + q.l1 * b + q.l2 * c, q.weight * t);
  }
}

}  // namespace

void for_each_triangle_point(const Point& a, const Point& b, const Point& c,
                             const std::function<void(const Point&, double)>& f) {
  const double diam =
      std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
  const int k = std::max(1, static_cast<int>(std::ceil(diam / kMaxQuadratureDiameter - 1e-12)));
  if (k == 1) {
    apply_rule(a, b, c, f);
    return;
  }
  const Point e1 = (b - a) / k, e2 = (c - a) / k;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k - i; ++j) {
      const Point o = a + i * e1 + j * e2;
      apply_rule(o, o + e1, o + e2, f);
      if (i + j < k - 1) apply_rule(o + e1, o + e1 + e2, o + e2, f);
    }
  }
}

double integrate_triangle(const Point& a, const Point& b, const Point& c,
                          const ScalarField& f) {
  double sum = 0.0;
  for_each_triangle_point(a, b, c,
                          [&](const Point& x, double w) { sum += w * f(x); });
  return sum;
}

double integrate_cell(const PolytopalMesh& mesh, std::size_t cell,
                      const ScalarField& f) {
  const Cell& c = mesh.cell(cell);
  if (c.vertex_ids.size() == 3) {
    return integrate_triangle(mesh.vertex(c.vertex_ids[0]).position,
                              mesh.vertex(c.vertex_ids[1]).position,
                              mesh.vertex(c.vertex_ids[2]).position, f);
  }
  double sum = 0.0;
  const std::size_t nv = c.vertex_ids.size();
  for (std::size_t i = 0; i < nv; ++i) {
    sum += integrate_triangle(c.center, mesh.vertex(c.vertex_ids[i]).position,
                              mesh.vertex(c.vertex_ids[(i + 1) % nv]).position, f);
  }
  return sum;
}

double integrate_segment(const Point& a, const Point& b, const ScalarField& f) {
  const double g = 0.5 / std::sqrt(3.0);
  const Point mid = 0.5 * (a + b);
  const Point half = b - a;
  const double len = half.norm();
  return 0.5 * len * (f(mid - g * half) + f(mid + g * half));
}

}  // namespace hmmrd
