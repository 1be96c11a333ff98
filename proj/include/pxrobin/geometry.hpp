#pragma once
/// @brief Structured triangulations of rectangles, reference quadrature rules
/// and P1 shape gradients.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <ostream>
#include <utility>
#include <vector>

#include "pxrobin/error.hpp"

namespace pxrobin {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  double dot(const Vec2& o) const noexcept { return x * o.x + y * o.y; }
  double norm() const noexcept { return std::hypot(x, y); }
};

/// Axis-aligned rectangle [x0,x1] x [y0,y1].
struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;

  double width() const noexcept { return x1 - x0; }
  double height() const noexcept { return y1 - y0; }
  double area() const noexcept { return width() * height(); }
  double perimeter() const noexcept { return 2.0 * (width() + height()); }
};

enum class Side : unsigned char { Bottom, Right, Top, Left };

struct BoundaryEdge {
  std::array<std::size_t, 2> v;  // oriented counter-clockwise around the domain
  Side side;
  std::size_t triangle;  // the single triangle owning this edge
};

/// Immutable 2D triangulation. Build with build_rect_mesh().
class Mesh {
 public:
  const std::vector<Point2>& vertices() const noexcept { return vertices_; }
  const std::vector<std::array<std::size_t, 3>>& triangles() const noexcept { return triangles_; }
  const std::vector<BoundaryEdge>& boundary_edges() const noexcept { return boundary_edges_; }
  /// Characteristic length: the longest edge.
  double h() const noexcept { return h_; }
  const Rect& rect() const noexcept { return rect_; }
  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }

  std::size_t num_vertices() const noexcept { return vertices_.size(); }
  std::size_t num_triangles() const noexcept { return triangles_.size(); }

  /// Signed area, positive for counter-clockwise triangles.
  double signed_area(std::size_t t) const {
    const auto& tri = triangles_[t];
    const Point2& a = vertices_[tri[0]];
    const Point2& b = vertices_[tri[1]];
    const Point2& c = vertices_[tri[2]];
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
  }

  double edge_length(const BoundaryEdge& e) const {
    const Point2& a = vertices_[e.v[0]];
    const Point2& b = vertices_[e.v[1]];
    return std::hypot(b.x - a.x, b.y - a.y);
  }

  bool is_boundary_vertex(std::size_t v) const {
    const Point2& p = vertices_[v];
    return p.x == rect_.x0 || p.x == rect_.x1 || p.y == rect_.y0 || p.y == rect_.y1;
  }

 private:
  friend Mesh build_rect_mesh(double, double, double, double, std::size_t, std::size_t);

  std::vector<Point2> vertices_;
  std::vector<std::array<std::size_t, 3>> triangles_;
  std::vector<BoundaryEdge> boundary_edges_;
  double h_ = 0.0;
  Rect rect_;
  std::size_t nx_ = 0, ny_ = 0;
};

/// Structured mesh of [x0,x1] x [y0,y1] with nx*ny cells, each split along
/// its lower-left to upper-right diagonal. Vertices are numbered row-major
/// (x fastest); boundary edges run counter-clockwise starting at (x0,y0).
inline Mesh build_rect_mesh(double x0, double y0, double x1, double y1, std::size_t nx,
                            std::size_t ny) {
  if (!(x1 > x0) || !(y1 > y0))
    throw InvalidArgument("build_rect_mesh: rectangle must have positive extent");
  if (nx == 0 || ny == 0) throw InvalidArgument("build_rect_mesh: subdivision counts must be positive");
  if (!std::isfinite(x0) || !std::isfinite(x1) || !std::isfinite(y0) || !std::isfinite(y1))
    throw InvalidArgument("build_rect_mesh: non-finite extent");

  Mesh m;
  m.rect_ = Rect{x0, y0, x1, y1};
  m.nx_ = nx;
  m.ny_ = ny;
  const double dx = (x1 - x0) / static_cast<double>(nx);
  const double dy = (y1 - y0) / static_cast<double>(ny);
  m.vertices_.reserve((nx + 1) * (ny + 1));
  for (std::size_t j = 0; j <= ny; ++j) {
    // pin the last row/column to the exact extent
    const double y = (j == ny) ? y1 : y0 + static_cast<double>(j) * dy;
    for (std::size_t i = 0; i <= nx; ++i) {
      const double x = (i == nx) ? x1 : x0 + static_cast<double>(i) * dx;
      m.vertices_.push_back({x, y});
    }
  }
  auto id = [nx](std::size_t i, std::size_t j) { return j * (nx + 1) + i; };

  m.triangles_.reserve(2 * nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t v00 = id(i, j), v10 = id(i + 1, j), v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
      m.triangles_.push_back({v00, v10, v11});
      m.triangles_.push_back({v00, v11, v01});
    }
  }
  // Lower triangle of cell (i,j) is 2*(j*nx+i), upper is that + 1.
  auto cell = [nx](std::size_t i, std::size_t j) { return 2 * (j * nx + i); };

  m.boundary_edges_.reserve(2 * (nx + ny));
  for (std::size_t i = 0; i < nx; ++i)
    m.boundary_edges_.push_back({{id(i, 0), id(i + 1, 0)}, Side::Bottom, cell(i, 0)});
  for (std::size_t j = 0; j < ny; ++j)
    m.boundary_edges_.push_back({{id(nx, j), id(nx, j + 1)}, Side::Right, cell(nx - 1, j)});
  for (std::size_t i = nx; i-- > 0;)
    m.boundary_edges_.push_back({{id(i + 1, ny), id(i, ny)}, Side::Top, cell(i, ny - 1) + 1});
  for (std::size_t j = ny; j-- > 0;)
    m.boundary_edges_.push_back({{id(0, j + 1), id(0, j)}, Side::Left, cell(0, j) + 1});

  m.h_ = std::max({dx, dy, std::hypot(dx, dy)});
  return m;
}

/// Quadrature on the reference triangle (0,0),(1,0),(0,1) in barycentric
/// coordinates; weights sum to 1/2.
struct TriangleRule {
  int degree = 0;
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
};

/// Quadrature on the reference segment [0,1]; weights sum to 1.
struct EdgeRule {
  int degree = 0;
  std::vector<double> points;
  std::vector<double> weights;
};

inline TriangleRule triangle_quadrature(int degree) {
  TriangleRule r;
  r.degree = degree;
  switch (degree) {
    case 1:
      r.points = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
      r.weights = {0.5};
      break;
    case 2:
      r.points = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
      r.weights = {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
      break;
    case 4: {
      // Dunavant, 6 points
      constexpr double a = 0.44594849091596488632;
      constexpr double b = 0.09157621350977074346;
      constexpr double wa = 0.22338158967801146570;
      constexpr double wb = 0.10995174365532186764;
      r.points = {{a, a, 1.0 - 2.0 * a}, {a, 1.0 - 2.0 * a, a}, {1.0 - 2.0 * a, a, a},
                  {b, b, 1.0 - 2.0 * b}, {b, 1.0 - 2.0 * b, b}, {1.0 - 2.0 * b, b, b}};
      r.weights = {0.5 * wa, 0.5 * wa, 0.5 * wa, 0.5 * wb, 0.5 * wb, 0.5 * wb};
      break;
    }
    default:
      throw InvalidArgument("triangle_quadrature: unsupported degree " + std::to_string(degree));
  }
  return r;
}

inline EdgeRule edge_quadrature(int degree) {
  EdgeRule r;
  r.degree = degree;
  switch (degree) {
    case 1:
      r.points = {0.5};
      r.weights = {1.0};
      break;
    case 3: {
      const double s = std::sqrt(3.0) / 6.0;
      r.points = {0.5 - s, 0.5 + s};
      r.weights = {0.5, 0.5};
      break;
    }
    default:
      throw InvalidArgument("edge_quadrature: unsupported degree " + std::to_string(degree));
  }
  return r;
}

using ElementGradients = std::array<Vec2, 3>;

/// Constant gradients of the three P1 shape functions on every triangle.
inline std::vector<ElementGradients> elem_gradients(const Mesh& mesh) {
  std::vector<ElementGradients> out;
  out.reserve(mesh.num_triangles());
  const double min_area = 1e-14 * mesh.h() * mesh.h();
  const auto& V = mesh.vertices();
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const double area = mesh.signed_area(t);
    if (!(area > min_area)) throw MeshError("degenerate triangle " + std::to_string(t));
    const auto& tri = mesh.triangles()[t];
    const Point2& p0 = V[tri[0]];
    const Point2& p1 = V[tri[1]];
    const Point2& p2 = V[tri[2]];
    const double s = 1.0 / (2.0 * area);
    out.push_back({Vec2{(p1.y - p2.y) * s, (p2.x - p1.x) * s},
                   Vec2{(p2.y - p0.y) * s, (p0.x - p2.x) * s},
                   Vec2{(p0.y - p1.y) * s, (p1.x - p0.x) * s}});
  }
  return out;
}

/// Writes the mesh as three CSV sections: `# vertices` (id,x,y),
/// `# triangles` (id,v0,v1,v2), `# boundary_edges` (id,v0,v1).
inline void write_mesh_csv(const Mesh& mesh, std::ostream& os) {
  const auto old_precision = os.precision(17);
  os << "# vertices\n";
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i)
    os << i << ',' << mesh.vertices()[i].x << ',' << mesh.vertices()[i].y << '\n';
  os << "# triangles\n";
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    os << t << ',' << tri[0] << ',' << tri[1] << ',' << tri[2] << '\n';
  }
  os << "# boundary_edges\n";
  for (std::size_t e = 0; e < mesh.boundary_edges().size(); ++e) {
    const auto& be = mesh.boundary_edges()[e];
    os << e << ',' << be.v[0] << ',' << be.v[1] << '\n';
  }
  os.precision(old_precision);
}

}  // namespace pxrobin
