#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "slipflow/vec2.hpp"

namespace slipflow {

/// Constrained Delaunay triangulation with Ruppert-style quality refinement.
///
/// Usage: insert the input vertices, declare the constraint segments (boundary
/// polylines), call recover_segments(), classify(), then refine().  Segments
/// may be marked non-splittable, which pins the boundary discretization of
/// periodic sides; encroached non-splittable segments simply veto the
/// offending circumcenter insertion.
class Triangulator {
  public:
    struct SegInfo {
        int tag = 0;
        bool splittable = true;
    };

    explicit Triangulator(double xmin, double ymin, double xmax, double ymax);

    int add_vertex(Vec2 p);
    void add_segment(int a, int b, SegInfo info);

    /// Force every declared segment to appear as an edge (midpoint insertion).
    void recover_segments();

    /// Parity flood fill from the exterior; triangles with an odd crossing
    /// count of constraint loops are "in domain" at depth 1 (holes at 2).
    void classify();

    /// Insert circumcenters / split segments until every in-domain triangle
    /// has min angle >= min_angle_deg and longest edge <= hmax.
    void refine(double hmax, double min_angle_deg);

    struct Extracted {
        std::vector<Vec2> nodes;
        std::vector<std::array<int, 3>> tris;
        std::vector<std::array<int, 3>> seg_edges;  ///< v0, v1, tag
    };
    /// Keep depth-1 triangles, drop unused vertices, renumber.
    Extracted extract() const;

  private:
    struct Tri {
        std::array<int, 3> v{-1, -1, -1};
        std::array<int, 3> n{-1, -1, -1};  ///< neighbor across edge opposite v[i]
        bool alive = false;
        int depth = -1;
    };

    using Key = std::pair<int, int>;
    static Key key(int a, int b) { return a < b ? Key{a, b} : Key{b, a}; }

    int locate(Vec2 p, int hint) const;
    int insert_point(Vec2 p, int hint);
    void legalize(int t, int edge);
    void flip(int t, int edge);
    int split_triangle(int t, int vid);
    int split_edge(int t, int edge, int vid);
    bool segment_present(int a, int b) const;
    double orient(Vec2 a, Vec2 b, Vec2 c) const {
        return (b - a).cross(c - a);
    }
    bool incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d) const;
    Vec2 circumcenter(int t) const;
    void link(int t, int edge, int nt);
    int neighbor_edge(int t, int nt) const;

    std::vector<Vec2> verts_;
    std::vector<Tri> tris_;
    std::map<Key, SegInfo> segments_;
    double scale_ = 1.0;
    int n_super_ = 0;
    int last_ = 0;
};

}  // namespace slipflow
