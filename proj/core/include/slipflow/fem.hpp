#pragma once

#include <array>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "slipflow/mesh.hpp"
#include "slipflow/vec2.hpp"

namespace slipflow {

/// Symmetric triangle quadrature in barycentric coordinates; weights sum to 1.
struct QuadRule {
    struct Point {
        double l1, l2, l3, w;
    };
    std::vector<Point> points;
};

/// Rules exact for polynomial degree 2, 4 or 6.
const QuadRule& tri_quadrature(int degree);

/// Gauss rule on [0,1] (3 points, exact through degree 5) for edge integrals.
struct EdgePoint {
    double t, w;
};
const std::vector<EdgePoint>& edge_quadrature();

/// P2 basis on the reference triangle: entities ordered (v0, v1, v2, e0, e1,
/// e2) where edge i is opposite vertex i.
void p2_values(double l1, double l2, double l3, double phi[6]);
/// Gradients given the (constant) barycentric gradients g1,g2,g3.
void p2_gradients(double l1, double l2, double l3, const Vec2 g[3], Vec2 grad[6]);

/// Continuous P2/P1 Taylor-Hood space over a PeriodicMesh.  Scalar P2
/// entities are mesh vertices followed by mesh edges; periodic sides are
/// identified master/slave so periodicity is exact by dof numbering.
class FemSpace {
  public:
    explicit FemSpace(std::shared_ptr<const PeriodicMesh> mesh);

    const PeriodicMesh& mesh() const { return *mesh_; }
    std::shared_ptr<const PeriodicMesh> mesh_ptr() const { return mesh_; }

    int num_vertices() const { return static_cast<int>(mesh_->nodes.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    /// Scalar P2 entity count (vertices + edges, before identification).
    int num_p2_entities() const { return num_vertices() + num_edges(); }

    /// The six P2 entities of a triangle: its vertices, then edge entities
    /// (vertex count offset applied).
    std::array<int, 6> element_p2(int t) const;
    /// Entity coordinates (vertex position or edge midpoint).
    Vec2 entity_pos(int e) const;
    /// Entity id of edge (a, b) if it exists (offset by vertex count).
    int edge_entity(int a, int b) const;

    /// Periodic master representative of a P2 entity / a vertex.
    int p2_master(int e) const { return p2_master_[e]; }
    int vertex_master(int v) const { return p2_master_[v]; }

    /// Reduced (identified) dof numbering.
    int num_p2_reduced() const { return n_p2_reduced_; }
    int num_p1_reduced() const { return n_p1_reduced_; }
    int p2_reduced(int entity) const { return p2_reduced_[p2_master_[entity]]; }
    int p1_reduced(int vertex) const { return p1_reduced_[p2_master_[vertex]]; }

    /// All P2 entities lying on edges with the given tag (vertices and edge
    /// midpoints), deduplicated, in deterministic order.
    std::vector<int> entities_on(BTag tag) const;

    /// Triangles adjacent to edge (a, b): second is -1 on the boundary.
    std::array<int, 2> edge_tris(int a, int b) const;

  private:
    std::shared_ptr<const PeriodicMesh> mesh_;
    std::vector<std::array<int, 2>> edges_;       ///< sorted vertex pairs
    std::vector<std::array<int, 3>> tri_edges_;   ///< edge ids per triangle
    std::vector<std::array<int, 2>> edge_tri_;    ///< adjacent triangles
    std::map<std::pair<int, int>, int> edge_lookup_;
    std::vector<int> p2_master_;
    std::vector<int> p2_reduced_;
    std::vector<int> p1_reduced_;
    int n_p2_reduced_ = 0;
    int n_p1_reduced_ = 0;
};

/// Barycentric point location over a mesh via a uniform background grid.
class Locator {
  public:
    explicit Locator(const PeriodicMesh& mesh);
    /// Triangle containing p and its barycentric coordinates.  Points within
    /// `snap` of the domain are clamped onto the nearest triangle.
    bool locate(Vec2 p, int& tri, double& l1, double& l2, double& l3,
                double snap = 1e-9) const;

  private:
    const PeriodicMesh* mesh_;
    double x0_, y0_, hx_, hy_;
    int nx_, ny_;
    std::vector<std::vector<int>> cells_;
};

/// Geometry of one element, precomputed for assembly and evaluation.
struct ElementGeometry {
    Vec2 p[3];
    double area;
    Vec2 grad_lambda[3];
};
ElementGeometry element_geometry(const PeriodicMesh& mesh, int t);

}  // namespace slipflow
