#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "pxrobin/geometry.hpp"

using namespace pxrobin;

namespace {

double total_area(const Mesh& m) {
  double a = 0;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) a += m.signed_area(t);
  return a;
}

}  // namespace

TEST(RectMesh, SingleCellCounts) {
  const Mesh m = build_rect_mesh(0, 0, 1, 1, 1, 1);
  EXPECT_EQ(m.num_vertices(), 4u);
  EXPECT_EQ(m.num_triangles(), 2u);
  EXPECT_EQ(m.boundary_edges().size(), 4u);
}

TEST(RectMesh, TwoByTwoCounts) {
  const Mesh m = build_rect_mesh(0, 0, 1, 1, 2, 2);
  EXPECT_EQ(m.num_vertices(), 9u);
  EXPECT_EQ(m.num_triangles(), 8u);
  EXPECT_EQ(m.boundary_edges().size(), 8u);
}

TEST(RectMesh, AreaOfTwoByOneRectangleIsExact) {
  EXPECT_EQ(total_area(build_rect_mesh(0, 0, 2, 1, 4, 2)), 2.0);
}

TEST(RectMesh, RejectsBadExtentsAndCounts) {
  EXPECT_THROW(build_rect_mesh(0, 0, 0, 1, 2, 2), InvalidArgument);
  EXPECT_THROW(build_rect_mesh(0, 1, 1, 1, 2, 2), InvalidArgument);
  EXPECT_THROW(build_rect_mesh(0, 0, 1, 1, 0, 2), InvalidArgument);
  EXPECT_THROW(build_rect_mesh(0, 0, 1, 1, 2, 0), InvalidArgument);
}

TEST(RectMesh, AreaAndPerimeterAcrossResolutions) {
  for (std::size_t nx : {1u, 3u, 17u, 64u, 128u})
    for (std::size_t ny : {1u, 5u, 128u}) {
      const Mesh m = build_rect_mesh(-0.5, 0.25, 1.75, 2.0, nx, ny);
      const double area = 2.25 * 1.75, perim = 2 * (2.25 + 1.75);
      EXPECT_NEAR(total_area(m), area, 1e-12 * area);
      double len = 0;
      for (const auto& e : m.boundary_edges()) len += m.edge_length(e);
      EXPECT_NEAR(len, perim, 1e-12 * perim);
      EXPECT_EQ(m.num_triangles(), 2 * nx * ny);
      EXPECT_EQ(m.num_vertices(), (nx + 1) * (ny + 1));
      EXPECT_EQ(m.boundary_edges().size(), 2 * (nx + ny));
    }
}

TEST(RectMesh, TrianglesPositivelyOrientedAndEdgesShared) {
  const Mesh m = build_rect_mesh(0, 0, 1, 1, 6, 4);
  std::map<std::pair<std::size_t, std::size_t>, int> count;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    EXPECT_GT(m.signed_area(t), 0.0);
    const auto& tri = m.triangles()[t];
    for (int k = 0; k < 3; ++k) {
      auto a = tri[k], b = tri[(k + 1) % 3];
      count[{std::min(a, b), std::max(a, b)}]++;
    }
  }
  std::set<std::pair<std::size_t, std::size_t>> boundary;
  for (const auto& e : m.boundary_edges()) boundary.insert({std::min(e.v[0], e.v[1]), std::max(e.v[0], e.v[1])});
  for (const auto& [edge, c] : count) EXPECT_EQ(c, boundary.count(edge) ? 1 : 2);
  EXPECT_EQ(boundary.size(), m.boundary_edges().size());
}

TEST(RectMesh, BoundaryEdgesFormOneClosedLoop) {
  const Mesh m = build_rect_mesh(0, 0, 3, 2, 5, 3);
  const auto& E = m.boundary_edges();
  for (std::size_t i = 0; i < E.size(); ++i) EXPECT_EQ(E[i].v[1], E[(i + 1) % E.size()].v[0]);
  for (const auto& e : E) {
    EXPECT_TRUE(m.is_boundary_vertex(e.v[0]));
    EXPECT_TRUE(m.is_boundary_vertex(e.v[1]));
  }
}

TEST(RectMesh, RowMajorVertexOrder) {
  const Mesh m = build_rect_mesh(0, 0, 1, 1, 2, 2);
  EXPECT_EQ(m.vertices()[1].x, 0.5);
  EXPECT_EQ(m.vertices()[1].y, 0.0);
  EXPECT_EQ(m.vertices()[3].x, 0.0);
  EXPECT_EQ(m.vertices()[3].y, 0.5);
  EXPECT_DOUBLE_EQ(m.h(), std::sqrt(0.5));
}

TEST(TriangleQuadrature, DeclaredRules) {
  const auto r1 = triangle_quadrature(1);
  ASSERT_EQ(r1.points.size(), 1u);
  EXPECT_DOUBLE_EQ(r1.weights[0], 0.5);
  EXPECT_DOUBLE_EQ(r1.points[0][0], 1.0 / 3.0);
  const auto r2 = triangle_quadrature(2);
  ASSERT_EQ(r2.points.size(), 3u);
  for (double w : r2.weights) EXPECT_DOUBLE_EQ(w, 1.0 / 6.0);
  EXPECT_THROW(triangle_quadrature(3), InvalidArgument);
  EXPECT_THROW(triangle_quadrature(0), InvalidArgument);
}

TEST(TriangleQuadrature, DegreeFourIntegratesXYExactly) {
  const auto r = triangle_quadrature(4);
  double s = 0;
  for (std::size_t i = 0; i < r.points.size(); ++i) s += r.weights[i] * r.points[i][1] * r.points[i][2];
  EXPECT_NEAR(s, 1.0 / 24.0, 1e-15);
}

// Exact integral of x^i y^j over the reference triangle: i! j! / (i + j + 2)!.
TEST(TriangleQuadrature, RandomPolynomialsUpToDeclaredDegree) {
  auto fact = [](int n) { return std::tgamma(n + 1.0); };
  std::mt19937_64 rng(3);
  std::normal_distribution<double> N;
  for (int degree : {1, 2, 4}) {
    const auto r = triangle_quadrature(degree);
    double wsum = 0;
    for (double w : r.weights) {
      EXPECT_GT(w, 0.0);
      wsum += w;
    }
    EXPECT_NEAR(wsum, 0.5, 1e-15);
    for (int trial = 0; trial < 20; ++trial) {
      double exact = 0, approx = 0, scale = 0;
      for (int i = 0; i <= degree; ++i)
        for (int j = 0; i + j <= degree; ++j) {
          const double c = N(rng);
          exact += c * fact(i) * fact(j) / fact(i + j + 2);
          scale += std::abs(c) * fact(i) * fact(j) / fact(i + j + 2);
          for (std::size_t k = 0; k < r.points.size(); ++k)
            approx += r.weights[k] * c * std::pow(r.points[k][1], i) * std::pow(r.points[k][2], j);
        }
      EXPECT_NEAR(approx, exact, 1e-13 * scale) << "degree " << degree;
    }
  }
}

TEST(EdgeQuadrature, DeclaredRules) {
  const auto r1 = edge_quadrature(1);
  ASSERT_EQ(r1.points.size(), 1u);
  EXPECT_EQ(r1.points[0], 0.5);
  EXPECT_EQ(r1.weights[0], 1.0);
  const auto r3 = edge_quadrature(3);
  ASSERT_EQ(r3.points.size(), 2u);
  EXPECT_NEAR(r3.points[0], (3 - std::sqrt(3.0)) / 6, 1e-15);
  EXPECT_NEAR(r3.points[1], (3 + std::sqrt(3.0)) / 6, 1e-15);
  EXPECT_EQ(r3.weights[0], 0.5);
  EXPECT_EQ(r3.weights[1], 0.5);
  EXPECT_THROW(edge_quadrature(2), InvalidArgument);
}

TEST(EdgeQuadrature, CubicExactness) {
  const auto r = edge_quadrature(3);
  double s = 0;
  for (std::size_t i = 0; i < r.points.size(); ++i) s += r.weights[i] * std::pow(r.points[i], 3);
  EXPECT_NEAR(s, 0.25, 1e-15);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> N;
  for (int trial = 0; trial < 20; ++trial) {
    double exact = 0, approx = 0, scale = 0;
    for (int i = 0; i <= 3; ++i) {
      const double c = N(rng);
      exact += c / (i + 1);
      scale += std::abs(c) / (i + 1);
      for (std::size_t k = 0; k < r.points.size(); ++k) approx += r.weights[k] * c * std::pow(r.points[k], i);
    }
    EXPECT_NEAR(approx, exact, 1e-13 * scale);
  }
}

TEST(ElementGradients, AffineFunctionsReproduced) {
  const Mesh m = build_rect_mesh(0, 0, 1.5, 1, 7, 5);
  const auto G = elem_gradients(m);
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangles()[t];
    Vec2 gx, gy, sum;
    for (int k = 0; k < 3; ++k) {
      const Point2& P = m.vertices()[tri[k]];
      gx.x += P.x * G[t][k].x;
      gx.y += P.x * G[t][k].y;
      gy.x += (3 * P.y - 2) * G[t][k].x;
      gy.y += (3 * P.y - 2) * G[t][k].y;
      sum.x += G[t][k].x;
      sum.y += G[t][k].y;
    }
    EXPECT_NEAR(gx.x, 1.0, 1e-13);
    EXPECT_NEAR(gx.y, 0.0, 1e-13);
    EXPECT_NEAR(gy.x, 0.0, 1e-13);
    EXPECT_NEAR(gy.y, 3.0, 1e-13);
    EXPECT_NEAR(sum.x, 0.0, 1e-14 * 10);
    EXPECT_NEAR(sum.y, 0.0, 1e-14 * 10);
  }
}

TEST(MeshCsv, SectionsAndRowCounts) {
  const Mesh m = build_rect_mesh(0, 0, 1, 1, 2, 1);
  std::ostringstream os;
  write_mesh_csv(m, os);
  const std::string s = os.str();
  EXPECT_NE(s.find("# vertices"), std::string::npos);
  EXPECT_NE(s.find("# triangles"), std::string::npos);
  EXPECT_NE(s.find("# boundary_edges"), std::string::npos);
  std::istringstream is(s);
  std::string line;
  int rows = 0;
  while (std::getline(is, line))
    if (!line.empty() && std::isdigit(static_cast<unsigned char>(line[0]))) ++rows;
  EXPECT_EQ(rows, 6 + 4 + 6);
}
