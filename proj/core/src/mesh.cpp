#include "slipflow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>
#include <set>

#include "slipflow/errors.hpp"

namespace slipflow {

const char* to_string(BTag tag) {
    switch (tag) {
        case BTag::pore: return "pore";
        case BTag::top: return "top";
        case BTag::bottom: return "bottom";
        case BTag::interface_s: return "interface_S";
        case BTag::left: return "periodic_left";
        case BTag::right: return "periodic_right";
    }
    return "?";
}

double PeriodicMesh::tri_area(int t) const {
    const auto& tr = tris[t];
    const Vec2 a = nodes[tr[0]], b = nodes[tr[1]], c = nodes[tr[2]];
    return 0.5 * (b - a).cross(c - a);
}

double PeriodicMesh::total_area() const {
    double s = 0.0;
    for (int t = 0; t < num_tris(); ++t) s += tri_area(t);
    return s;
}

double PeriodicMesh::min_angle_deg() const {
    double worst = 180.0;
    for (const auto& tr : tris) {
        for (int i = 0; i < 3; ++i) {
            const Vec2 a = nodes[tr[i]];
            const Vec2 u = nodes[tr[(i + 1) % 3]] - a;
            const Vec2 v = nodes[tr[(i + 2) % 3]] - a;
            const double ang =
                std::atan2(std::abs(u.cross(v)), u.dot(v)) * 180.0 / std::numbers::pi;
            worst = std::min(worst, ang);
        }
    }
    return worst;
}

std::vector<TaggedEdge> PeriodicMesh::edges_with_tag(BTag tag) const {
    std::vector<TaggedEdge> out;
    for (const auto& e : tagged_edges)
        if (e.tag == tag) out.push_back(e);
    return out;
}

std::vector<int> PeriodicMesh::tris_in_layer(int label) const {
    std::vector<int> out;
    for (int t = 0; t < num_tris(); ++t)
        if (tri_layer[t] == label) out.push_back(t);
    return out;
}

const LayerBand* PeriodicMesh::band(int label) const {
    for (const auto& b : layer_bands)
        if (b.label == label) return &b;
    return nullptr;
}

void PeriodicMesh::audit(double min_angle) const {
    for (int t = 0; t < num_tris(); ++t)
        if (tri_area(t) <= 0.0)
            throw GeometryError("mesh audit: non-positive triangle " +
                                std::to_string(t));
    const double ma = min_angle_deg();
    if (ma < min_angle)
        throw GeometryError("mesh audit: min angle " + std::to_string(ma) +
                            " below bound " + std::to_string(min_angle));

    const double tol = 1e-9 * std::max(1.0, std::max(std::abs(xmax), std::abs(ymax)));
    if (x_period > 0.0) {
        std::set<int> used_right;
        for (const auto& pr : periodic_x) {
            const Vec2 a = nodes[pr[0]], b = nodes[pr[1]];
            if (std::abs(a.x - xmin) > tol || std::abs(b.x - xmax) > tol ||
                std::abs(a.y - b.y) > tol)
                throw GeometryError("mesh audit: bad periodic_x pair");
            if (!used_right.insert(pr[1]).second)
                throw GeometryError("mesh audit: periodic_x not a bijection");
        }
        int left_count = 0;
        for (const auto& p : nodes)
            if (std::abs(p.x - xmin) < tol) ++left_count;
        if (left_count != static_cast<int>(periodic_x.size()))
            throw GeometryError("mesh audit: unpaired left-boundary node");
    }
    if (y_period > 0.0) {
        for (const auto& pr : periodic_y) {
            const Vec2 a = nodes[pr[0]], b = nodes[pr[1]];
            if (std::abs(a.y - ymin) > tol || std::abs(b.y - ymax) > tol ||
                std::abs(a.x - b.x) > tol)
                throw GeometryError("mesh audit: bad periodic_y pair");
        }
    }

    // No triangle may cross the interface line y = 0.
    for (const auto& tr : tris) {
        bool pos = false, neg = false;
        for (int i = 0; i < 3; ++i) {
            if (nodes[tr[i]].y > tol) pos = true;
            if (nodes[tr[i]].y < -tol) neg = true;
        }
        if (pos && neg)
            throw GeometryError("mesh audit: triangle crosses the interface");
    }
}

void PeriodicMesh::write_text(std::ostream& os) const {
    os << "# slipflow mesh v1\n";
    os << "# nodes: id x y\n";
    os << "nodes " << nodes.size() << "\n";
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        char buf[80];
        std::snprintf(buf, sizeof buf, "%zu %.17g %.17g\n", i, nodes[i].x,
                      nodes[i].y);
        os << buf;
    }
    os << "# triangles: id v0 v1 v2 region layer\n";
    os << "triangles " << tris.size() << "\n";
    for (std::size_t t = 0; t < tris.size(); ++t)
        os << t << ' ' << tris[t][0] << ' ' << tris[t][1] << ' ' << tris[t][2]
           << ' ' << (tri_region[t] == Region::below_s ? "below_S" : "above_S")
           << ' ' << tri_layer[t] << "\n";
    os << "# edges: id v0 v1 tag\n";
    os << "edges " << tagged_edges.size() << "\n";
    for (std::size_t e = 0; e < tagged_edges.size(); ++e)
        os << e << ' ' << tagged_edges[e].v0 << ' ' << tagged_edges[e].v1 << ' '
           << to_string(tagged_edges[e].tag) << "\n";
}

double InclusionSpec::boundary_radius(double theta) const {
    if (kind == Kind::circle) return radius;
    double r = 1.0;
    const std::size_t n = std::max(star_cos.size(), star_sin.size());
    for (std::size_t k = 1; k <= n; ++k) {
        const double ak = k <= star_cos.size() ? star_cos[k - 1] : 0.0;
        const double bk = k <= star_sin.size() ? star_sin[k - 1] : 0.0;
        r += ak * std::cos(k * theta) + bk * std::sin(k * theta);
    }
    return radius * r;
}

Vec2 InclusionSpec::boundary_point(double theta) const {
    const double r = boundary_radius(theta);
    return center + Vec2{r * std::cos(theta), r * std::sin(theta)};
}

bool InclusionSpec::contains(Vec2 p) const {
    const Vec2 d = p - center;
    const double rr = d.norm();
    if (rr == 0.0) return true;
    return rr < boundary_radius(std::atan2(d.y, d.x));
}

double InclusionSpec::max_radius() const {
    if (kind == Kind::circle) return radius;
    double m = 0.0;
    for (int i = 0; i < 720; ++i)
        m = std::max(m, boundary_radius(i * std::numbers::pi / 360.0));
    return m;
}

void InclusionSpec::validate() const {
    constexpr double margin = 0.02;
    if (radius <= 0.0) throw GeometryError("inclusion: radius must be positive");
    double rmin = radius;
    if (kind == Kind::smooth_star) {
        rmin = 1e300;
        for (int i = 0; i < 720; ++i) {
            const double r = boundary_radius(i * std::numbers::pi / 360.0);
            rmin = std::min(rmin, r);
        }
        if (rmin <= 0.0)
            throw GeometryError("inclusion: radial function must stay positive");
    }
    const double rmax = max_radius();
    const double clearance =
        std::min(std::min(center.x, 1.0 - center.x), std::min(center.y, 1.0 - center.y));
    if (rmax > clearance - margin)
        throw GeometryError(
            "inclusion: boundary closer than 0.02 to the cell boundary");
}

}  // namespace slipflow
