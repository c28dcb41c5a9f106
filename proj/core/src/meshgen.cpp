#include "slipflow/meshgen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "slipflow/delaunay.hpp"
#include "slipflow/errors.hpp"

namespace slipflow {

namespace {

constexpr double kPi = std::numbers::pi;

/// Accumulates nodes (with coordinate dedup), triangles and tags, then
/// finalizes into a PeriodicMesh with coordinate-matched periodic pairs.
class MeshBuilder {
  public:
    explicit MeshBuilder(double span) : tol_(1e-9 * std::max(1.0, span)) {}

    int add_node(Vec2 p) {
        const Key k{std::llround(p.x / tol_), std::llround(p.y / tol_)};
        const auto it = lookup_.find(k);
        if (it != lookup_.end()) return it->second;
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back(p);
        lookup_.emplace(k, id);
        return id;
    }

    void add_tri(int a, int b, int c, Region region, int layer) {
        tris_.push_back({a, b, c});
        regions_.push_back(region);
        layers_.push_back(layer);
    }

    void add_edge(int a, int b, BTag tag) { edges_.push_back({a, b, tag}); }

    void add_band(int label, double y0, double y1) {
        bands_.push_back({label, y0, y1});
    }

    const Vec2& node(int id) const { return nodes_[id]; }

    PeriodicMesh finalize(bool periodic_x, bool periodic_y) {
        PeriodicMesh m;
        m.nodes = std::move(nodes_);
        m.tris = std::move(tris_);
        m.tri_region = std::move(regions_);
        m.tri_layer = std::move(layers_);
        m.tagged_edges = std::move(edges_);
        m.layer_bands = std::move(bands_);
        m.xmin = 1e300;
        m.xmax = -1e300;
        m.ymin = 1e300;
        m.ymax = -1e300;
        for (const auto& p : m.nodes) {
            m.xmin = std::min(m.xmin, p.x);
            m.xmax = std::max(m.xmax, p.x);
            m.ymin = std::min(m.ymin, p.y);
            m.ymax = std::max(m.ymax, p.y);
        }
        if (periodic_x) {
            m.x_period = m.xmax - m.xmin;
            m.periodic_x = pair_nodes(m, true);
        }
        if (periodic_y) {
            m.y_period = m.ymax - m.ymin;
            m.periodic_y = pair_nodes(m, false);
        }
        return m;
    }

  private:
    using Key = std::pair<long long, long long>;

    std::vector<std::array<int, 2>> pair_nodes(const PeriodicMesh& m,
                                               bool in_x) const {
        std::vector<std::pair<double, int>> lo, hi;
        for (int i = 0; i < m.num_nodes(); ++i) {
            const Vec2 p = m.nodes[i];
            const double primary = in_x ? p.x : p.y;
            const double secondary = in_x ? p.y : p.x;
            const double mn = in_x ? m.xmin : m.ymin;
            const double mx = in_x ? m.xmax : m.ymax;
            if (std::abs(primary - mn) < tol_) lo.emplace_back(secondary, i);
            if (std::abs(primary - mx) < tol_) hi.emplace_back(secondary, i);
        }
        std::sort(lo.begin(), lo.end());
        std::sort(hi.begin(), hi.end());
        if (lo.size() != hi.size())
            throw GeometryError("mesh builder: periodic sides differ in node count");
        std::vector<std::array<int, 2>> pairs(lo.size());
        for (std::size_t i = 0; i < lo.size(); ++i) {
            if (std::abs(lo[i].first - hi[i].first) > 10.0 * tol_)
                throw GeometryError("mesh builder: periodic nodes misaligned");
            pairs[i] = {lo[i].second, hi[i].second};
        }
        return pairs;
    }

    double tol_;
    std::vector<Vec2> nodes_;
    std::vector<std::array<int, 3>> tris_;
    std::vector<Region> regions_;
    std::vector<int> layers_;
    std::vector<TaggedEdge> edges_;
    std::vector<LayerBand> bands_;
    std::map<Key, int> lookup_;
};

/// Quality triangulation of the unit cell with the inclusion removed.
/// All four sides carry exactly n uniform segments (non-splittable, so the
/// layout survives refinement and tiles/pairs exactly).
Triangulator::Extracted cell_template(const InclusionSpec& inc, int n) {
    inc.validate();
    Triangulator tri(0.0, 0.0, 1.0, 1.0);
    const double h = 1.0 / n;

    // Outer box vertices, counter-clockwise per side.
    std::vector<int> bottom(n + 1), right(n + 1), top(n + 1), left(n + 1);
    for (int i = 0; i <= n; ++i) bottom[i] = tri.add_vertex({i * h, 0.0});
    for (int i = 1; i <= n; ++i) right[i] = tri.add_vertex({1.0, i * h});
    right[0] = bottom[n];
    for (int i = 1; i <= n; ++i) top[i] = tri.add_vertex({1.0 - i * h, 1.0});
    top[0] = right[n];
    for (int i = 1; i < n; ++i) left[i] = tri.add_vertex({0.0, 1.0 - i * h});
    left[0] = top[n];
    left[n] = bottom[0];

    const int tag_box = 100;  // side segments; dropped from the extracted tags
    for (int i = 0; i < n; ++i) {
        tri.add_segment(bottom[i], bottom[i + 1], {tag_box, false});
        tri.add_segment(right[i], right[i + 1], {tag_box, false});
        tri.add_segment(top[i], top[i + 1], {tag_box, false});
        tri.add_segment(left[i], left[i + 1], {tag_box, false});
    }

    // Inclusion polyline at arc-length spacing <= h/2.
    double perimeter = 0.0;
    {
        Vec2 prev = inc.boundary_point(0.0);
        for (int i = 1; i <= 256; ++i) {
            const Vec2 cur = inc.boundary_point(2.0 * kPi * i / 256.0);
            perimeter += (cur - prev).norm();
            prev = cur;
        }
    }
    const int m = std::max(16, static_cast<int>(std::ceil(perimeter / (0.5 * h))));
    std::vector<int> ring(m);
    for (int i = 0; i < m; ++i)
        ring[i] = tri.add_vertex(inc.boundary_point(2.0 * kPi * i / m));
    const int tag_pore = 1;
    for (int i = 0; i < m; ++i)
        tri.add_segment(ring[i], ring[(i + 1) % m], {tag_pore, true});

    tri.recover_segments();
    tri.classify();
    tri.refine(1.05 * h, 23.0);
    tri.classify();
    return tri.extract();
}

int elems_per_side(double h) {
    int n = std::max(4, static_cast<int>(std::lround(1.0 / h)));
    if (n % 2) ++n;  // even counts keep the 2:1 coarsening exact
    return n;
}

/// One 2:1 transition row: 2k+... bottom nodes spaced w at height y,
/// top nodes spaced 2w at height y + w.
struct RowNodes {
    std::vector<int> ids;
    double y = 0.0;
    double w = 0.0;
};

RowNodes transition_row(MeshBuilder& b, const RowNodes& bot, double x0,
                        Region region, int layer) {
    const int c = static_cast<int>(bot.ids.size()) - 1;
    const double w = bot.w;
    RowNodes top;
    top.w = 2.0 * w;
    top.y = bot.y + w;
    top.ids.resize(c / 2 + 1);
    for (int i = 0; i <= c / 2; ++i)
        top.ids[i] = b.add_node({x0 + 2.0 * w * i, top.y});
    for (int i = 0; i < c / 2; ++i) {
        const int b0 = bot.ids[2 * i], b1 = bot.ids[2 * i + 1],
                  b2 = bot.ids[2 * i + 2];
        const int t0 = top.ids[i], t1 = top.ids[i + 1];
        b.add_tri(b0, b1, t0, region, layer);
        b.add_tri(b1, t1, t0, region, layer);
        b.add_tri(b1, b2, t1, region, layer);
    }
    return top;
}

RowNodes uniform_row(MeshBuilder& b, const RowNodes& bot, double height, double x0,
                     Region region, int layer) {
    const int c = static_cast<int>(bot.ids.size()) - 1;
    RowNodes top;
    top.w = bot.w;
    top.y = bot.y + height;
    top.ids.resize(c + 1);
    for (int i = 0; i <= c; ++i)
        top.ids[i] = b.add_node({x0 + bot.w * i, top.y});
    for (int i = 0; i < c; ++i) {
        b.add_tri(bot.ids[i], bot.ids[i + 1], top.ids[i], region, layer);
        b.add_tri(bot.ids[i + 1], top.ids[i + 1], top.ids[i], region, layer);
    }
    return top;
}

/// Structured block from `bot` up to y_end: coarsen 2:1 until spacing
/// reaches target_w, then square rows.  Returns the final row; emits one
/// layer band per row starting at `first_label` (0 disables labeling).
RowNodes graded_block(MeshBuilder& b, RowNodes bot, double x0, double y_end,
                      double target_w, Region region, int first_label) {
    int label = first_label;
    auto next_label = [&]() {
        const int l = label;
        if (label != 0) ++label;
        return l;
    };
    while (bot.w < target_w * 0.75 &&
           (static_cast<int>(bot.ids.size()) - 1) % 2 == 0 &&
           y_end - bot.y > 3.0 * bot.w) {
        const int l = next_label();
        const double y0 = bot.y;
        bot = transition_row(b, bot, x0, region, l);
        if (l != 0) b.add_band(l, y0, bot.y);
    }
    const double rem = y_end - bot.y;
    int k = std::max(1, static_cast<int>(std::lround(rem / bot.w)));
    while (k > 1 && rem / k < 0.45 * bot.w) --k;
    for (int i = 0; i < k; ++i) {
        const int l = next_label();
        const double y0 = bot.y;
        bot = uniform_row(b, bot, rem / k, x0, region, l);
        if (l != 0) b.add_band(l, y0, bot.y);
    }
    return bot;
}

void tag_row_edges(MeshBuilder& b, const RowNodes& row, BTag tag) {
    for (std::size_t i = 0; i + 1 < row.ids.size(); ++i)
        b.add_edge(row.ids[i], row.ids[i + 1], tag);
}

/// Paste one copy of the cell template, scaled by `scale` and offset, into
/// the builder.  Returns nothing; pore edges are tagged.
void paste_template(MeshBuilder& b, const Triangulator::Extracted& tpl,
                    double scale, Vec2 offset, Region region, int layer) {
    std::vector<int> remap(tpl.nodes.size());
    for (std::size_t i = 0; i < tpl.nodes.size(); ++i)
        remap[i] = b.add_node(offset + tpl.nodes[i] * scale);
    for (const auto& t : tpl.tris)
        b.add_tri(remap[t[0]], remap[t[1]], remap[t[2]], region, layer);
    for (const auto& e : tpl.seg_edges)
        if (e[2] == 1) b.add_edge(remap[e[0]], remap[e[1]], BTag::pore);
}

}  // namespace

PeriodicMesh build_cell_mesh(const InclusionSpec& inclusion, double h) {
    if (!(h > 0.0)) throw ConfigError("build_cell_mesh: h must be positive");
    const int n = elems_per_side(h);
    const auto tpl = cell_template(inclusion, n);

    MeshBuilder b(1.0);
    paste_template(b, tpl, 1.0, {0.0, 0.0}, Region::below_s, 0);
    PeriodicMesh m = b.finalize(true, true);
    m.audit();
    return m;
}

PeriodicMesh build_strip_mesh(const InclusionSpec& inclusion, int n_pore_layers,
                              double top_height, double h) {
    if (n_pore_layers < 2)
        throw ConfigError("build_strip_mesh: need at least 2 pore layers");
    if (top_height < 1.0)
        throw ConfigError("build_strip_mesh: top_height must be >= 1");
    const int n = elems_per_side(h);
    const auto tpl = cell_template(inclusion, n);

    MeshBuilder b(top_height + n_pore_layers);
    // Pore rows k = 1..n_pore_layers occupy y in (-k, -k+1); band label -k.
    for (int k = 1; k <= n_pore_layers; ++k) {
        paste_template(b, tpl, 1.0, {0.0, static_cast<double>(-k)},
                       Region::below_s, -k);
        b.add_band(-k, -static_cast<double>(k), -static_cast<double>(k - 1));
    }

    // Boundary rows of the tiled block: uniform spacing 1/n by construction.
    RowNodes s_row, bottom_row;
    s_row.w = bottom_row.w = 1.0 / n;
    s_row.y = 0.0;
    bottom_row.y = -static_cast<double>(n_pore_layers);
    for (int i = 0; i <= n; ++i) {
        s_row.ids.push_back(b.add_node({i * s_row.w, 0.0}));
        bottom_row.ids.push_back(b.add_node({i * s_row.w, bottom_row.y}));
    }
    tag_row_edges(b, s_row, BTag::interface_s);
    tag_row_edges(b, bottom_row, BTag::bottom);

    // Free half Z+, graded upward; rows labeled 1,2,...
    RowNodes top_row =
        graded_block(b, s_row, 0.0, top_height, 0.25, Region::above_s, 1);
    tag_row_edges(b, top_row, BTag::top);

    PeriodicMesh m = b.finalize(true, false);
    m.audit();
    return m;
}

PeriodicMesh build_eps_mesh(const InclusionSpec& inclusion, double eps, double L,
                            double h_free, double K_depth,
                            int elems_per_pore_diameter, double h_macro) {
    const double cols_d = L / eps;
    const double rows_d = K_depth / eps;
    const int cols = static_cast<int>(std::lround(cols_d));
    const int rows = static_cast<int>(std::lround(rows_d));
    if (std::abs(cols_d - cols) > 1e-9 || cols < 1)
        throw ConfigError("build_eps_mesh: L/eps must be a positive integer");
    if (std::abs(rows_d - rows) > 1e-9 || rows < 1)
        throw ConfigError("build_eps_mesh: K_depth/eps must be a positive integer");

    // Template resolution: elems_per_pore_diameter across the inclusion.
    const double diam = 2.0 * inclusion.max_radius();
    int n = std::max(4, static_cast<int>(std::lround(
                            elems_per_pore_diameter / std::max(diam, 1e-9))));
    if (n % 2) ++n;
    const auto tpl = cell_template(inclusion, n);

    MeshBuilder b(std::max(L, h_free + K_depth));
    for (int k = 1; k <= rows; ++k) {
        for (int j = 0; j < cols; ++j)
            paste_template(b, tpl, eps, {j * eps, -k * eps}, Region::below_s, -k);
        b.add_band(-k, -k * eps, -(k - 1) * eps);
    }

    const double w0 = eps / n;
    RowNodes s_row, bottom_row;
    s_row.w = bottom_row.w = w0;
    s_row.y = 0.0;
    bottom_row.y = -K_depth;
    const int total_cols = cols * n;
    for (int i = 0; i <= total_cols; ++i) {
        s_row.ids.push_back(b.add_node({i * w0, 0.0}));
        bottom_row.ids.push_back(b.add_node({i * w0, bottom_row.y}));
    }
    tag_row_edges(b, s_row, BTag::interface_s);
    tag_row_edges(b, bottom_row, BTag::bottom);

    RowNodes top_row =
        graded_block(b, s_row, 0.0, h_free, h_macro, Region::above_s, 1);
    tag_row_edges(b, top_row, BTag::top);

    PeriodicMesh m = b.finalize(true, false);
    m.audit();
    return m;
}

PeriodicMesh build_rect_mesh(double L, double y0, double y1, double h,
                             BTag bottom_tag, BTag top_tag) {
    if (!(L > 0.0) || !(y1 > y0) || !(h > 0.0))
        throw ConfigError("build_rect_mesh: bad extents");
    const int nx = std::max(2, static_cast<int>(std::lround(L / h)));
    const int ny = std::max(2, static_cast<int>(std::lround((y1 - y0) / h)));
    const double wx = L / nx, wy = (y1 - y0) / ny;

    MeshBuilder b(std::max(L, y1 - y0));
    RowNodes row;
    row.w = wx;
    row.y = y0;
    for (int i = 0; i <= nx; ++i) row.ids.push_back(b.add_node({i * wx, y0}));
    tag_row_edges(b, row, bottom_tag);
    const Region region = (y0 >= -1e-12) ? Region::above_s : Region::below_s;
    for (int k = 0; k < ny; ++k)
        row = uniform_row(b, row, wy, 0.0, region, 0);
    tag_row_edges(b, row, top_tag);

    PeriodicMesh m = b.finalize(true, false);
    m.audit();
    return m;
}

}  // namespace slipflow
