#include "slipflow/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

#include "slipflow/errors.hpp"

namespace slipflow {

// Triangle conventions: vertices CCW; edge i joins v[(i+1)%3] -> v[(i+2)%3]
// (the edge opposite v[i]); n[i] is the neighbor sharing edge i.

Triangulator::Triangulator(double xmin, double ymin, double xmax, double ymax) {
    const double dx = xmax - xmin, dy = ymax - ymin;
    scale_ = std::max(dx, dy);
    const double m = 10.0 * scale_;
    verts_ = {{xmin - m, ymin - m},
              {xmax + m, ymin - m},
              {xmax + m, ymax + m},
              {xmin - m, ymax + m}};
    n_super_ = 4;
    tris_.resize(2);
    tris_[0].v = {0, 1, 2};
    tris_[0].n = {-1, 1, -1};  // edge 1 of (0,1,2) is (2,0), shared with tri 1
    tris_[0].alive = true;
    tris_[1].v = {0, 2, 3};
    tris_[1].n = {-1, -1, 0};  // edge 2 of (0,2,3) is (0,2)
    tris_[1].alive = true;
    last_ = 0;
}

bool Triangulator::incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d) const {
    const double ax = a.x - d.x, ay = a.y - d.y;
    const double bx = b.x - d.x, by = b.y - d.y;
    const double cx = c.x - d.x, cy = c.y - d.y;
    const double det = (ax * ax + ay * ay) * (bx * cy - cx * by) -
                       (bx * bx + by * by) * (ax * cy - cx * ay) +
                       (cx * cx + cy * cy) * (ax * by - bx * ay);
    // Ties (cocircular quadruples from structured inputs) count as "not
    // inside", so no flip happens; any tie-break gives a valid variant.
    return det > 1e-12 * scale_ * scale_ * scale_ * scale_;
}

int Triangulator::locate(Vec2 p, int hint) const {
    int t = -1;
    if (hint >= 0 && hint < static_cast<int>(tris_.size()) && tris_[hint].alive)
        t = hint;
    if (t < 0) {
        for (int i = static_cast<int>(tris_.size()) - 1; i >= 0; --i)
            if (tris_[i].alive) { t = i; break; }
    }
    const double eps = -1e-13 * scale_ * scale_;
    int steps = 0;
    const int max_steps = static_cast<int>(tris_.size()) * 4 + 64;
    while (steps++ < max_steps) {
        const Tri& tr = tris_[t];
        int move = -1;
        for (int e = 0; e < 3; ++e) {
            const Vec2 a = verts_[tr.v[(e + 1) % 3]];
            const Vec2 b = verts_[tr.v[(e + 2) % 3]];
            if (orient(a, b, p) < eps) { move = e; break; }
        }
        if (move < 0) return t;
        const int nt = tr.n[move];
        if (nt < 0) return t;
        t = nt;
    }
    for (int i = 0; i < static_cast<int>(tris_.size()); ++i) {
        if (!tris_[i].alive) continue;
        const Tri& tr = tris_[i];
        bool ok = true;
        for (int e = 0; e < 3 && ok; ++e)
            ok = orient(verts_[tr.v[(e + 1) % 3]], verts_[tr.v[(e + 2) % 3]], p) >=
                 eps;
        if (ok) return i;
    }
    throw GeometryError("triangulator: point location failed");
}

int Triangulator::neighbor_edge(int t, int nt) const {
    // Which edge of nt is shared with t?
    const Tri& tr = tris_[nt];
    for (int e = 0; e < 3; ++e)
        if (tr.n[e] == t) return e;
    const auto& sv = tris_[t].v;
    for (int e = 0; e < 3; ++e) {
        const int a = tr.v[(e + 1) % 3], b = tr.v[(e + 2) % 3];
        int shared = 0;
        for (int i = 0; i < 3; ++i)
            if (sv[i] == a || sv[i] == b) ++shared;
        if (shared == 2) return e;
    }
    throw GeometryError("triangulator: broken adjacency");
}

void Triangulator::link(int t, int edge, int nt) {
    tris_[t].n[edge] = nt;
    if (nt >= 0) tris_[nt].n[neighbor_edge(t, nt)] = t;
}

int Triangulator::add_vertex(Vec2 p) {
    const int vid = static_cast<int>(verts_.size());
    verts_.push_back(p);
    last_ = insert_point(p, last_);
    return vid;
}

int Triangulator::insert_point(Vec2 p, int hint) {
    const int vid = static_cast<int>(verts_.size()) - 1;
    const int t = locate(p, hint);
    const Tri& tr = tris_[t];
    int on_edge = -1;
    double best = 1e300;
    for (int e = 0; e < 3; ++e) {
        const Vec2 a = verts_[tr.v[(e + 1) % 3]];
        const Vec2 b = verts_[tr.v[(e + 2) % 3]];
        const double len = (b - a).norm();
        const double d = std::abs(orient(a, b, p)) / len;
        const double along = (p - a).dot(b - a) / (len * len);
        if (d < 1e-10 * scale_ && along > -1e-12 && along < 1.0 + 1e-12 &&
            d < best) {
            best = d;
            on_edge = e;
        }
    }
    if (on_edge >= 0) return split_edge(t, on_edge, vid);
    return split_triangle(t, vid);
}

int Triangulator::split_triangle(int t, int vid) {
    const Tri old = tris_[t];
    const int t1 = static_cast<int>(tris_.size());
    const int t2 = t1 + 1;
    tris_.push_back({});
    tris_.push_back({});
    // (v0,v1,vid), (v1,v2,vid), (v2,v0,vid); vid sits at index 2,
    // so the edge opposite the new vertex is edge 2.
    tris_[t].v = {old.v[0], old.v[1], vid};
    tris_[t].alive = true;
    tris_[t].depth = old.depth;
    tris_[t].n = {t1, t2, old.n[2]};
    tris_[t1].v = {old.v[1], old.v[2], vid};
    tris_[t1].alive = true;
    tris_[t1].depth = old.depth;
    tris_[t1].n = {t2, t, old.n[0]};
    tris_[t2].v = {old.v[2], old.v[0], vid};
    tris_[t2].alive = true;
    tris_[t2].depth = old.depth;
    tris_[t2].n = {t, t1, old.n[1]};
    if (old.n[2] >= 0) link(t, 2, old.n[2]);
    if (old.n[0] >= 0) link(t1, 2, old.n[0]);
    if (old.n[1] >= 0) link(t2, 2, old.n[1]);
    legalize(t, 2);
    legalize(t1, 2);
    legalize(t2, 2);
    return t;
}

int Triangulator::split_edge(int t, int edge, int vid) {
    const int a = tris_[t].v[(edge + 1) % 3];
    const int b = tris_[t].v[(edge + 2) % 3];
    const int c = tris_[t].v[edge];
    const int to = tris_[t].n[edge];

    const auto it = segments_.find(key(a, b));
    if (it != segments_.end()) {
        const SegInfo info = it->second;
        segments_.erase(it);
        segments_[key(a, vid)] = info;
        segments_[key(vid, b)] = info;
    }

    const Tri old = tris_[t];
    const int ta = old.n[(edge + 2) % 3];  // across (c, a)
    const int tb = old.n[(edge + 1) % 3];  // across (b, c)
    const int t1 = static_cast<int>(tris_.size());
    tris_.push_back({});
    // T1 = (c, a, m): edges -- 0:(a,m) other side, 1:(m,c) T2, 2:(c,a) ta
    tris_[t].v = {c, a, vid};
    tris_[t].depth = old.depth;
    tris_[t].n = {-1, t1, ta};
    if (ta >= 0) link(t, 2, ta);
    // T2 = (b, c, m): edges -- 0:(c,m) T1, 1:(m,b) other side, 2:(b,c) tb
    tris_[t1].v = {b, c, vid};
    tris_[t1].alive = true;
    tris_[t1].depth = old.depth;
    tris_[t1].n = {t, -1, tb};
    if (tb >= 0) link(t1, 2, tb);

    if (to >= 0) {
        const Tri oldo = tris_[to];
        int eo = -1;
        for (int e = 0; e < 3; ++e) {
            const int oa = oldo.v[(e + 1) % 3], ob = oldo.v[(e + 2) % 3];
            if ((oa == a && ob == b) || (oa == b && ob == a)) { eo = e; break; }
        }
        if (eo < 0) throw GeometryError("triangulator: split adjacency");
        const int d = oldo.v[eo];
        const int n_db = oldo.n[(eo + 2) % 3];  // across (d, b)
        const int n_ad = oldo.n[(eo + 1) % 3];  // across (a, d)
        const int t2 = static_cast<int>(tris_.size());
        tris_.push_back({});
        // T3 = (d, b, m): edges -- 0:(b,m) T2, 1:(m,d) T4, 2:(d,b) n_db
        tris_[to].v = {d, b, vid};
        tris_[to].depth = oldo.depth;
        tris_[to].n = {t1, t2, n_db};
        if (n_db >= 0) link(to, 2, n_db);
        // T4 = (a, d, m): edges -- 0:(d,m) T3, 1:(m,a) T1, 2:(a,d) n_ad
        tris_[t2].v = {a, d, vid};
        tris_[t2].alive = true;
        tris_[t2].depth = oldo.depth;
        tris_[t2].n = {to, t, n_ad};
        if (n_ad >= 0) link(t2, 2, n_ad);
        tris_[t].n[0] = t2;   // T1 across (a,m) -> T4
        tris_[t1].n[1] = to;  // T2 across (m,b) -> T3
        legalize(t, 2);
        legalize(t1, 2);
        legalize(to, 2);
        legalize(t2, 2);
    } else {
        legalize(t, 2);
        legalize(t1, 2);
    }
    return t;
}

void Triangulator::legalize(int t, int edge) {
    const int nt = tris_[t].n[edge];
    if (nt < 0) return;
    const int a = tris_[t].v[(edge + 1) % 3];
    const int b = tris_[t].v[(edge + 2) % 3];
    if (segments_.count(key(a, b))) return;
    const int eo = neighbor_edge(t, nt);
    const int d = tris_[nt].v[eo];
    const int c = tris_[t].v[edge];
    if (!incircle(verts_[c], verts_[a], verts_[b], verts_[d])) return;
    flip(t, edge);
    // flip() leaves t = (c,a,d), nt = (c,d,b); recheck the edges opposite c.
    legalize(t, 0);
    legalize(nt, 0);
}

void Triangulator::flip(int t, int edge) {
    const int nt = tris_[t].n[edge];
    const int eo = neighbor_edge(t, nt);
    const int c = tris_[t].v[edge];
    const int a = tris_[t].v[(edge + 1) % 3];
    const int b = tris_[t].v[(edge + 2) % 3];
    const int d = tris_[nt].v[eo];
    const int ta = tris_[t].n[(edge + 2) % 3];   // across (c, a)
    const int tb = tris_[t].n[(edge + 1) % 3];   // across (b, c)
    const int n_db = tris_[nt].n[(eo + 2) % 3];  // across (d, b)
    const int n_ad = tris_[nt].n[(eo + 1) % 3];  // across (a, d)
    const int depth_t = tris_[t].depth;
    const int depth_n = tris_[nt].depth;
    // New pair around diagonal (c, d):
    // t  = (c, a, d): edges -- 0:(a,d) n_ad, 1:(d,c) nt, 2:(c,a) ta
    // nt = (c, d, b): edges -- 0:(d,b) n_db, 1:(b,c) tb, 2:(c,d) t
    tris_[t].v = {c, a, d};
    tris_[t].n = {n_ad, nt, ta};
    tris_[t].depth = depth_t;
    tris_[nt].v = {c, d, b};
    tris_[nt].n = {n_db, tb, t};
    tris_[nt].depth = depth_n;
    if (n_ad >= 0) link(t, 0, n_ad);
    if (ta >= 0) link(t, 2, ta);
    if (n_db >= 0) link(nt, 0, n_db);
    if (tb >= 0) link(nt, 1, tb);
}

void Triangulator::add_segment(int a, int b, SegInfo info) {
    segments_[key(a, b)] = info;
}

bool Triangulator::segment_present(int a, int b) const {
    for (const auto& tr : tris_) {
        if (!tr.alive) continue;
        for (int e = 0; e < 3; ++e) {
            const int va = tr.v[(e + 1) % 3], vb = tr.v[(e + 2) % 3];
            if ((va == a && vb == b) || (va == b && vb == a)) return true;
        }
    }
    return false;
}

void Triangulator::recover_segments() {
    bool again = true;
    int guard = 0;
    while (again) {
        if (++guard > 64)
            throw GeometryError("triangulator: segment recovery diverged");
        again = false;
        const auto snapshot = segments_;
        for (const auto& [k, info] : snapshot) {
            if (!segments_.count(k)) continue;  // already split this pass
            if (segment_present(k.first, k.second)) continue;
            const Vec2 mid = (verts_[k.first] + verts_[k.second]) * 0.5;
            const SegInfo i2 = info;
            segments_.erase(k);
            const int vid = static_cast<int>(verts_.size());
            verts_.push_back(mid);
            segments_[key(k.first, vid)] = i2;
            segments_[key(vid, k.second)] = i2;
            last_ = insert_point(mid, last_);
            again = true;
        }
    }
}

void Triangulator::classify() {
    for (auto& tr : tris_)
        if (tr.alive) tr.depth = -1;
    std::deque<int> q;
    for (int i = 0; i < static_cast<int>(tris_.size()); ++i) {
        if (!tris_[i].alive || tris_[i].depth >= 0) continue;
        for (int e = 0; e < 3; ++e)
            if (tris_[i].v[e] < n_super_) {
                tris_[i].depth = 0;
                q.push_back(i);
                break;
            }
    }
    while (!q.empty()) {
        const int t = q.front();
        q.pop_front();
        for (int e = 0; e < 3; ++e) {
            const int nt = tris_[t].n[e];
            if (nt < 0 || !tris_[nt].alive || tris_[nt].depth >= 0) continue;
            const int a = tris_[t].v[(e + 1) % 3], b = tris_[t].v[(e + 2) % 3];
            tris_[nt].depth =
                segments_.count(key(a, b)) ? tris_[t].depth + 1 : tris_[t].depth;
            q.push_back(nt);
        }
    }
}

Vec2 Triangulator::circumcenter(int t) const {
    const Vec2 a = verts_[tris_[t].v[0]];
    const Vec2 b = verts_[tris_[t].v[1]];
    const Vec2 c = verts_[tris_[t].v[2]];
    const Vec2 ab = b - a, ac = c - a;
    const double d = 2.0 * ab.cross(ac);
    const double ab2 = ab.squared_norm(), ac2 = ac.squared_norm();
    return a + Vec2{(ac.y * ab2 - ab.y * ac2) / d, (ab.x * ac2 - ac.x * ab2) / d};
}

void Triangulator::refine(double hmax, double min_angle_deg) {
    const double min_sin = std::sin(min_angle_deg * std::numbers::pi / 180.0);
    const double len_floor = 0.05 * hmax;

    auto bad = [&](int t) -> bool {
        if (!tris_[t].alive || tris_[t].depth != 1) return false;
        const Vec2 a = verts_[tris_[t].v[0]];
        const Vec2 b = verts_[tris_[t].v[1]];
        const Vec2 c = verts_[tris_[t].v[2]];
        const double la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
        const double lmax = std::max({la, lb, lc});
        if (lmax > hmax) return true;
        const double lmin = std::min({la, lb, lc});
        const double lmid = la + lb + lc - lmax - lmin;
        const double sin_min = std::abs((b - a).cross(c - a)) / (lmax * lmid);
        return sin_min < min_sin && lmin > len_floor;
    };

    int inserted = 0;
    const int cap = 400000;
    bool progressed = true;
    while (progressed) {
        progressed = false;
        for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
            if (!bad(t)) continue;
            if (++inserted > cap)
                throw GeometryError("triangulator: refinement did not terminate");
            const Vec2 cc = circumcenter(t);

            Key enc{-1, -1};
            bool veto = false;
            for (const auto& [k, info] : segments_) {
                const Vec2 a = verts_[k.first], b = verts_[k.second];
                if ((cc - a).dot(cc - b) < 0.0) {
                    if (info.splittable) { enc = k; break; }
                    veto = true;
                }
            }
            if (enc.first >= 0) {
                const Vec2 mid = (verts_[enc.first] + verts_[enc.second]) * 0.5;
                const SegInfo info = segments_[enc];
                segments_.erase(enc);
                const int vid = static_cast<int>(verts_.size());
                verts_.push_back(mid);
                segments_[key(enc.first, vid)] = info;
                segments_[key(vid, enc.second)] = info;
                last_ = insert_point(mid, last_);
                progressed = true;
                continue;
            }
            if (veto) continue;

            const int ct = locate(cc, t);
            if (!tris_[ct].alive || tris_[ct].depth != 1) continue;
            verts_.push_back(cc);
            last_ = insert_point(cc, ct);
            progressed = true;
        }
    }
}

Triangulator::Extracted Triangulator::extract() const {
    Extracted out;
    std::vector<int> remap(verts_.size(), -1);
    for (const auto& tr : tris_) {
        if (!tr.alive || tr.depth != 1) continue;
        std::array<int, 3> v{};
        for (int i = 0; i < 3; ++i) {
            int& m = remap[tr.v[i]];
            if (m < 0) {
                m = static_cast<int>(out.nodes.size());
                out.nodes.push_back(verts_[tr.v[i]]);
            }
            v[i] = m;
        }
        if (orient(out.nodes[v[0]], out.nodes[v[1]], out.nodes[v[2]]) < 0.0)
            std::swap(v[1], v[2]);
        out.tris.push_back(v);
    }
    for (const auto& [k, info] : segments_) {
        const int a = remap[k.first], b = remap[k.second];
        if (a >= 0 && b >= 0) out.seg_edges.push_back({a, b, info.tag});
    }
    return out;
}

}  // namespace slipflow
