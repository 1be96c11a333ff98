#pragma once
/// @brief P1 finite element space on a Mesh: cached quadrature points for
/// volume and boundary integrals, nodal functions, and fields sampled at the
/// quadrature points.

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <array>
#include <cstddef>
#include <memory>
#include <vector>

#include "pxrobin/error.hpp"
#include "pxrobin/expr.hpp"
#include "pxrobin/geometry.hpp"

namespace pxrobin {

using NodalVector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Nodal coefficients of a piecewise-linear function on a mesh.
struct DiscreteFunction {
  std::shared_ptr<const Mesh> mesh;
  NodalVector values;

  DiscreteFunction() = default;
  DiscreteFunction(std::shared_ptr<const Mesh> m, NodalVector v) : mesh(std::move(m)), values(std::move(v)) {
    if (!mesh) throw InvalidArgument("DiscreteFunction: null mesh");
    if (static_cast<std::size_t>(values.size()) != mesh->num_vertices())
      throw InvalidArgument("DiscreteFunction: value count does not match vertex count");
    if (!values.allFinite()) throw InvalidArgument("DiscreteFunction: non-finite nodal value");
  }

  static DiscreteFunction zero(std::shared_ptr<const Mesh> m) {
    const auto n = static_cast<Eigen::Index>(m->num_vertices());
    return {std::move(m), NodalVector::Zero(n)};
  }

  /// Nodal interpolant of a field.
  static DiscreteFunction interpolate(std::shared_ptr<const Mesh> m, const FieldExpr& f) {
    NodalVector v(static_cast<Eigen::Index>(m->num_vertices()));
    for (std::size_t i = 0; i < m->num_vertices(); ++i) v[static_cast<Eigen::Index>(i)] = f(m->vertices()[i]);
    return {std::move(m), std::move(v)};
  }
};

struct VolumePoint {
  std::size_t triangle;
  double weight;  // physical weight (includes the Jacobian)
  std::array<double, 3> shape;
  Point2 pos;
};

struct BoundaryPoint {
  std::size_t edge;
  std::array<std::size_t, 2> v;
  double weight;
  std::array<double, 2> shape;
  Point2 pos;
};

/// Values of a field at every volume and boundary quadrature point of a space.
struct SampledField {
  std::vector<double> vol;
  std::vector<double> bnd;
};

/// Quadrature caches for integrals over a mesh and its boundary.
class FeSpace {
 public:
  FeSpace(std::shared_ptr<const Mesh> mesh, int tri_degree = 4, int edge_degree = 3)
      : mesh_(std::move(mesh)),
        tri_rule_(triangle_quadrature(tri_degree)),
        edge_rule_(edge_quadrature(edge_degree)) {
    if (!mesh_) throw InvalidArgument("FeSpace: null mesh");
    grads_ = elem_gradients(*mesh_);
    const auto& V = mesh_->vertices();
    const std::size_t nq = tri_rule_.weights.size();
    vol_.reserve(mesh_->num_triangles() * nq);
    for (std::size_t t = 0; t < mesh_->num_triangles(); ++t) {
      const auto& tri = mesh_->triangles()[t];
      const double jac = 2.0 * mesh_->signed_area(t);
      for (std::size_t q = 0; q < nq; ++q) {
        const auto& b = tri_rule_.points[q];
        Point2 p{b[0] * V[tri[0]].x + b[1] * V[tri[1]].x + b[2] * V[tri[2]].x,
                 b[0] * V[tri[0]].y + b[1] * V[tri[1]].y + b[2] * V[tri[2]].y};
        vol_.push_back({t, tri_rule_.weights[q] * jac, b, p});
      }
    }
    const auto& edges = mesh_->boundary_edges();
    bnd_.reserve(edges.size() * edge_rule_.weights.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const auto& be = edges[e];
      const double len = mesh_->edge_length(be);
      const Point2& a = V[be.v[0]];
      const Point2& c = V[be.v[1]];
      for (std::size_t q = 0; q < edge_rule_.weights.size(); ++q) {
        const double s = edge_rule_.points[q];
        bnd_.push_back({e, be.v, edge_rule_.weights[q] * len, {1.0 - s, s},
                        Point2{(1.0 - s) * a.x + s * c.x, (1.0 - s) * a.y + s * c.y}});
      }
    }
  }

  const Mesh& mesh() const noexcept { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const noexcept { return mesh_; }
  std::size_t num_dofs() const noexcept { return mesh_->num_vertices(); }
  Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(mesh_->num_vertices()); }
  const TriangleRule& triangle_rule() const noexcept { return tri_rule_; }
  const EdgeRule& edge_rule() const noexcept { return edge_rule_; }
  std::size_t points_per_triangle() const noexcept { return tri_rule_.weights.size(); }
  const std::vector<VolumePoint>& volume_points() const noexcept { return vol_; }
  const std::vector<BoundaryPoint>& boundary_points() const noexcept { return bnd_; }
  const std::vector<ElementGradients>& gradients() const noexcept { return grads_; }

  SampledField sample(const FieldExpr& f) const {
    SampledField s;
    s.vol.reserve(vol_.size());
    s.bnd.reserve(bnd_.size());
    for (const auto& q : vol_) s.vol.push_back(f(q.pos));
    for (const auto& q : bnd_) s.bnd.push_back(f(q.pos));
    return s;
  }

  double value_at(const NodalVector& u, const VolumePoint& q) const {
    const auto& tri = mesh_->triangles()[q.triangle];
    return q.shape[0] * u[idx(tri[0])] + q.shape[1] * u[idx(tri[1])] + q.shape[2] * u[idx(tri[2])];
  }

  double value_at(const NodalVector& u, const BoundaryPoint& q) const {
    return q.shape[0] * u[idx(q.v[0])] + q.shape[1] * u[idx(q.v[1])];
  }

  Vec2 gradient_on(const NodalVector& u, std::size_t t) const {
    const auto& tri = mesh_->triangles()[t];
    const auto& g = grads_[t];
    Vec2 r;
    for (int k = 0; k < 3; ++k) {
      r.x += u[idx(tri[k])] * g[k].x;
      r.y += u[idx(tri[k])] * g[k].y;
    }
    return r;
  }

  void check(const NodalVector& u) const {
    if (u.size() != size()) throw InvalidArgument("nodal vector length does not match the mesh");
  }

  static Eigen::Index idx(std::size_t i) noexcept { return static_cast<Eigen::Index>(i); }

 private:
  std::shared_ptr<const Mesh> mesh_;
  TriangleRule tri_rule_;
  EdgeRule edge_rule_;
  std::vector<ElementGradients> grads_;
  std::vector<VolumePoint> vol_;
  std::vector<BoundaryPoint> bnd_;
};

/// Exact P1 matrices with constant unit coefficients: stiffness K, consistent
/// mass M, and consistent boundary mass B. Assembled from closed-form element
/// matrices, independently of the quadrature caches.
struct LinearMatrices {
  SparseMatrix K, M, B;
};

inline LinearMatrices assemble_linear_matrices(const Mesh& mesh) {
  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> tk, tm, tb;
  const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
  const auto grads = elem_gradients(mesh);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const double area = mesh.signed_area(t);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const auto I = static_cast<Eigen::Index>(tri[i]);
        const auto J = static_cast<Eigen::Index>(tri[j]);
        tk.emplace_back(I, J, area * grads[t][i].dot(grads[t][j]));
        tm.emplace_back(I, J, area / 12.0 * (i == j ? 2.0 : 1.0));
      }
    }
  }
  for (const auto& e : mesh.boundary_edges()) {
    const double len = mesh.edge_length(e);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        tb.emplace_back(static_cast<Eigen::Index>(e.v[i]), static_cast<Eigen::Index>(e.v[j]),
                        len / 6.0 * (i == j ? 2.0 : 1.0));
  }
  LinearMatrices out{SparseMatrix(n, n), SparseMatrix(n, n), SparseMatrix(n, n)};
  out.K.setFromTriplets(tk.begin(), tk.end());
  out.M.setFromTriplets(tm.begin(), tm.end());
  out.B.setFromTriplets(tb.begin(), tb.end());
  return out;
}

}  // namespace pxrobin
