#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "slipflow/vec2.hpp"

namespace slipflow {

/// Boundary / interface tags.  `interface_s` marks internal mesh edges lying
/// on the flat interface S (y2 = 0); it is resolved by edges, never crossed
/// by a triangle.
enum class BTag : std::uint8_t {
    pore = 0,
    top = 1,
    bottom = 2,
    interface_s = 3,
    left = 4,
    right = 5,
};

const char* to_string(BTag tag);

struct TaggedEdge {
    int v0;
    int v1;
    BTag tag;
};

/// Horizontal band of triangles sharing a generator layer label; the strip
/// and eps meshes record one band per pore row (labels -1, -2, ... downward)
/// and per structured row above the interface (labels 1, 2, ... upward).
struct LayerBand {
    int label;
    double y0;
    double y1;
};

/// Triangle region labels.
enum class Region : std::uint8_t { above_s = 0, below_s = 1 };

/// Straight-edge triangulation with periodic node pairing and tags.
/// Triangles are positively oriented.  Immutable after construction.
struct PeriodicMesh {
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 3>> tris;
    std::vector<Region> tri_region;
    std::vector<int> tri_layer;  ///< generator band label, 0 when unlabeled
    std::vector<TaggedEdge> tagged_edges;
    std::vector<std::array<int, 2>> periodic_x;  ///< {left, right} node pairs
    std::vector<std::array<int, 2>> periodic_y;  ///< {bottom, top} node pairs
    std::vector<LayerBand> layer_bands;
    double x_period = 0.0;  ///< 0 when not periodic in x
    double y_period = 0.0;
    double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;

    int num_nodes() const { return static_cast<int>(nodes.size()); }
    int num_tris() const { return static_cast<int>(tris.size()); }

    double tri_area(int t) const;
    double total_area() const;
    double min_angle_deg() const;

    std::vector<TaggedEdge> edges_with_tag(BTag tag) const;
    std::vector<int> tris_in_layer(int label) const;
    const LayerBand* band(int label) const;

    /// Throws GeometryError if orientation, angle bound, periodic pairing,
    /// or interface conformity is violated.
    void audit(double min_angle = 20.0) const;

    /// Plain-text export: node table, triangle table with region, tagged
    /// edge table.  Column layout documented in the header comment it writes.
    void write_text(std::ostream& os) const;
};

/// Solid inclusion of the reference cell: a circle or a smooth star-shaped
/// curve r(theta) = radius * (1 + sum_k cos_amp[k-1] cos(k theta)
///                               + sin_amp[k-1] sin(k theta)).
struct InclusionSpec {
    enum class Kind { circle, smooth_star };
    Kind kind = Kind::circle;
    Vec2 center{0.5, 0.5};
    double radius = 0.25;
    std::vector<double> star_cos;
    std::vector<double> star_sin;

    double boundary_radius(double theta) const;
    Vec2 boundary_point(double theta) const;
    bool contains(Vec2 p) const;
    double max_radius() const;
    /// Enforces closure strictly inside (0,1)^2 with margin >= 0.02.
    void validate() const;
};

}  // namespace slipflow
