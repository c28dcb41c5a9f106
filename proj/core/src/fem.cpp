#include "slipflow/fem.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "slipflow/errors.hpp"

namespace slipflow {

const QuadRule& tri_quadrature(int degree) {
    // Dunavant symmetric rules; weights normalized to sum 1.
    static const QuadRule deg2{{{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0},
                                {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0},
                                {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0, 1.0 / 3.0}}};
    static const QuadRule deg4 = [] {
        QuadRule r;
        const double a1 = 0.816847572980459, b1 = 0.091576213509771,
                     w1 = 0.109951743655322;
        const double a2 = 0.108103018168070, b2 = 0.445948490915965,
                     w2 = 0.223381589678011;
        r.points = {{a1, b1, b1, w1}, {b1, a1, b1, w1}, {b1, b1, a1, w1},
                    {a2, b2, b2, w2}, {b2, a2, b2, w2}, {b2, b2, a2, w2}};
        return r;
    }();
    static const QuadRule deg6 = [] {
        QuadRule r;
        const double a1 = 0.873821971016996, b1 = 0.063089014491502,
                     w1 = 0.050844906370207;
        const double a2 = 0.501426509658179, b2 = 0.249286745170910,
                     w2 = 0.116786275726379;
        const double a3 = 0.636502499121399, b3 = 0.310352451033785,
                     c3 = 0.053145049844816, w3 = 0.082851075618374;
        r.points = {{a1, b1, b1, w1}, {b1, a1, b1, w1}, {b1, b1, a1, w1},
                    {a2, b2, b2, w2}, {b2, a2, b2, w2}, {b2, b2, a2, w2},
                    {a3, b3, c3, w3}, {a3, c3, b3, w3}, {b3, a3, c3, w3},
                    {b3, c3, a3, w3}, {c3, a3, b3, w3}, {c3, b3, a3, w3}};
        return r;
    }();
    if (degree <= 2) return deg2;
    if (degree <= 4) return deg4;
    return deg6;
}

const std::vector<EdgePoint>& edge_quadrature() {
    static const std::vector<EdgePoint> pts = [] {
        const double s = std::sqrt(0.6);
        return std::vector<EdgePoint>{{0.5 * (1.0 - s), 5.0 / 18.0},
                                      {0.5, 8.0 / 18.0},
                                      {0.5 * (1.0 + s), 5.0 / 18.0}};
    }();
    return pts;
}

void p2_values(double l1, double l2, double l3, double phi[6]) {
    phi[0] = l1 * (2.0 * l1 - 1.0);
    phi[1] = l2 * (2.0 * l2 - 1.0);
    phi[2] = l3 * (2.0 * l3 - 1.0);
    phi[3] = 4.0 * l2 * l3;
    phi[4] = 4.0 * l3 * l1;
    phi[5] = 4.0 * l1 * l2;
}

void p2_gradients(double l1, double l2, double l3, const Vec2 g[3], Vec2 grad[6]) {
    grad[0] = g[0] * (4.0 * l1 - 1.0);
    grad[1] = g[1] * (4.0 * l2 - 1.0);
    grad[2] = g[2] * (4.0 * l3 - 1.0);
    grad[3] = (g[1] * l3 + g[2] * l2) * 4.0;
    grad[4] = (g[2] * l1 + g[0] * l3) * 4.0;
    grad[5] = (g[0] * l2 + g[1] * l1) * 4.0;
}

ElementGeometry element_geometry(const PeriodicMesh& mesh, int t) {
    ElementGeometry eg;
    for (int i = 0; i < 3; ++i) eg.p[i] = mesh.nodes[mesh.tris[t][i]];
    const double twoA = (eg.p[1] - eg.p[0]).cross(eg.p[2] - eg.p[0]);
    eg.area = 0.5 * twoA;
    for (int i = 0; i < 3; ++i) {
        const Vec2 b = eg.p[(i + 1) % 3], c = eg.p[(i + 2) % 3];
        eg.grad_lambda[i] = Vec2{b.y - c.y, c.x - b.x} / twoA;
    }
    return eg;
}

namespace {
struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void merge(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};
}  // namespace

FemSpace::FemSpace(std::shared_ptr<const PeriodicMesh> mesh)
    : mesh_(std::move(mesh)) {
    const auto& m = *mesh_;
    const int nv = m.num_nodes();

    // Unique edge table with triangle adjacency.
    tri_edges_.resize(m.num_tris());
    for (int t = 0; t < m.num_tris(); ++t) {
        for (int e = 0; e < 3; ++e) {
            const int a = m.tris[t][(e + 1) % 3];
            const int b = m.tris[t][(e + 2) % 3];
            const auto k = std::minmax(a, b);
            auto it = edge_lookup_.find({k.first, k.second});
            if (it == edge_lookup_.end()) {
                it = edge_lookup_
                         .emplace(std::pair<int, int>{k.first, k.second},
                                  static_cast<int>(edges_.size()))
                         .first;
                edges_.push_back({k.first, k.second});
                edge_tri_.push_back({t, -1});
            } else {
                edge_tri_[it->second][1] = t;
            }
            tri_edges_[t][e] = it->second;
        }
    }
    const auto& edge_id = edge_lookup_;

    // Periodic identification of vertices and boundary edges.
    UnionFind uf(nv + static_cast<int>(edges_.size()));
    auto merge_edges = [&](const std::vector<std::array<int, 2>>& pairs) {
        std::map<int, int> partner;
        for (const auto& pr : pairs) partner[pr[0]] = pr[1];
        for (const auto& pr : pairs) uf.merge(pr[0], pr[1]);
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            const auto pa = partner.find(edges_[e][0]);
            const auto pb = partner.find(edges_[e][1]);
            if (pa == partner.end() || pb == partner.end()) continue;
            const auto k = std::minmax(pa->second, pb->second);
            const auto it = edge_id.find({k.first, k.second});
            if (it == edge_id.end())
                throw GeometryError("fem: periodic boundary edges do not match");
            uf.merge(nv + static_cast<int>(e), nv + it->second);
        }
    };
    if (m.x_period > 0.0) merge_edges(m.periodic_x);
    if (m.y_period > 0.0) merge_edges(m.periodic_y);

    const int n_ent = nv + static_cast<int>(edges_.size());
    p2_master_.resize(n_ent);
    for (int e = 0; e < n_ent; ++e) p2_master_[e] = uf.find(e);

    p2_reduced_.assign(n_ent, -1);
    n_p2_reduced_ = 0;
    for (int e = 0; e < n_ent; ++e)
        if (p2_master_[e] == e) p2_reduced_[e] = n_p2_reduced_++;

    p1_reduced_.assign(nv, -1);
    n_p1_reduced_ = 0;
    for (int v = 0; v < nv; ++v)
        if (p2_master_[v] == v) p1_reduced_[v] = n_p1_reduced_++;
}

std::array<int, 6> FemSpace::element_p2(int t) const {
    const auto& tv = mesh_->tris[t];
    const int nv = num_vertices();
    return {tv[0], tv[1], tv[2], nv + tri_edges_[t][0], nv + tri_edges_[t][1],
            nv + tri_edges_[t][2]};
}

Vec2 FemSpace::entity_pos(int e) const {
    const int nv = num_vertices();
    if (e < nv) return mesh_->nodes[e];
    const auto& ed = edges_[e - nv];
    return (mesh_->nodes[ed[0]] + mesh_->nodes[ed[1]]) * 0.5;
}

int FemSpace::edge_entity(int a, int b) const {
    const auto k = std::minmax(a, b);
    const auto it = edge_lookup_.find({k.first, k.second});
    if (it == edge_lookup_.end()) return -1;
    return num_vertices() + it->second;
}

std::array<int, 2> FemSpace::edge_tris(int a, int b) const {
    const auto k = std::minmax(a, b);
    const auto it = edge_lookup_.find({k.first, k.second});
    if (it == edge_lookup_.end()) return {-1, -1};
    return edge_tri_[it->second];
}

std::vector<int> FemSpace::entities_on(BTag tag) const {
    std::vector<int> out;
    std::vector<char> seen(num_p2_entities(), 0);
    for (const auto& te : mesh_->tagged_edges) {
        if (te.tag != tag) continue;
        const int ee = edge_entity(te.v0, te.v1);
        if (ee < 0) throw GeometryError("fem: tagged edge missing from mesh");
        const int ids[3] = {te.v0, te.v1, ee};
        for (int id : ids)
            if (!seen[id]) {
                seen[id] = 1;
                out.push_back(id);
            }
    }
    return out;
}

Locator::Locator(const PeriodicMesh& mesh) : mesh_(&mesh) {
    x0_ = mesh.xmin;
    y0_ = mesh.ymin;
    const double w = mesh.xmax - mesh.xmin, h = mesh.ymax - mesh.ymin;
    const int target = std::max(1, static_cast<int>(std::sqrt(
                                       static_cast<double>(mesh.num_tris()))));
    nx_ = std::max(1, target);
    ny_ = std::max(1, target);
    hx_ = w / nx_;
    hy_ = h / ny_;
    cells_.resize(static_cast<std::size_t>(nx_) * ny_);
    for (int t = 0; t < mesh.num_tris(); ++t) {
        double txmin = 1e300, txmax = -1e300, tymin = 1e300, tymax = -1e300;
        for (int i = 0; i < 3; ++i) {
            const Vec2 p = mesh.nodes[mesh.tris[t][i]];
            txmin = std::min(txmin, p.x);
            txmax = std::max(txmax, p.x);
            tymin = std::min(tymin, p.y);
            tymax = std::max(tymax, p.y);
        }
        const int i0 = std::clamp(static_cast<int>((txmin - x0_) / hx_), 0, nx_ - 1);
        const int i1 = std::clamp(static_cast<int>((txmax - x0_) / hx_), 0, nx_ - 1);
        const int j0 = std::clamp(static_cast<int>((tymin - y0_) / hy_), 0, ny_ - 1);
        const int j1 = std::clamp(static_cast<int>((tymax - y0_) / hy_), 0, ny_ - 1);
        for (int j = j0; j <= j1; ++j)
            for (int i = i0; i <= i1; ++i)
                cells_[static_cast<std::size_t>(j) * nx_ + i].push_back(t);
    }
}

bool Locator::locate(Vec2 p, int& tri, double& l1, double& l2, double& l3,
                     double snap) const {
    const int ci = std::clamp(static_cast<int>((p.x - x0_) / hx_), 0, nx_ - 1);
    const int cj = std::clamp(static_cast<int>((p.y - y0_) / hy_), 0, ny_ - 1);
    double best_def = 1e300;
    int best_t = -1;
    double bl1 = 0, bl2 = 0, bl3 = 0;
    for (int ring = 0; ring < std::max(nx_, ny_); ++ring) {
        for (int j = std::max(0, cj - ring); j <= std::min(ny_ - 1, cj + ring); ++j) {
            for (int i = std::max(0, ci - ring); i <= std::min(nx_ - 1, ci + ring);
                 ++i) {
                if (ring > 0 && std::abs(i - ci) != ring && std::abs(j - cj) != ring)
                    continue;
                for (int t : cells_[static_cast<std::size_t>(j) * nx_ + i]) {
                    const auto& tv = mesh_->tris[t];
                    const Vec2 a = mesh_->nodes[tv[0]], bb = mesh_->nodes[tv[1]],
                               c = mesh_->nodes[tv[2]];
                    const double twoA = (bb - a).cross(c - a);
                    const double m1 = (bb - p).cross(c - p) / twoA;
                    const double m2 = (c - p).cross(a - p) / twoA;
                    const double m3 = 1.0 - m1 - m2;
                    const double deficit =
                        std::max({-m1, -m2, -m3, 0.0});
                    if (deficit < best_def) {
                        best_def = deficit;
                        best_t = t;
                        bl1 = m1;
                        bl2 = m2;
                        bl3 = m3;
                    }
                    if (deficit == 0.0) break;
                }
                if (best_def == 0.0) break;
            }
            if (best_def == 0.0) break;
        }
        if (best_def == 0.0) break;
        if (ring >= 1 && best_def < 1e300) break;  // nearest found in halo
    }
    if (best_t < 0) return false;
    if (best_def > snap && best_def > 1e-7) return false;
    tri = best_t;
    l1 = std::max(0.0, bl1);
    l2 = std::max(0.0, bl2);
    l3 = std::max(0.0, bl3);
    const double s = l1 + l2 + l3;
    l1 /= s;
    l2 /= s;
    l3 /= s;
    return true;
}

}  // namespace slipflow
