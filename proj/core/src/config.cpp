#include "slipflow/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "slipflow/errors.hpp"

namespace slipflow {

using nlohmann::json;

BodyForce ForceSpec::make(double L) const {
    if (kind == Kind::constant) {
        const double fx = cx, fy = cy;
        return [fx, fy](Vec2) { return Vec2{fx, fy}; };
    }
    const double fx = cx, fy = cy, gx = ax, gy = ay;
    const double w = 2.0 * std::numbers::pi / L;
    return [fx, fy, gx, gy, w](Vec2 x) {
        return Vec2{fx + gx * std::cos(w * x.x), fy + gy * std::sin(w * x.x)};
    };
}

void WorkbenchConfig::validate() const {
    if (version != 1) throw ConfigError("config: unsupported schema version");
    if (!(box.L > 0.0) || !(box.h_free > 0.0) || !(box.K_depth > 0.0))
        throw ConfigError("config: box extents must be positive");
    if (std::abs(curve.period() - box.L) > 1e-12 * box.L)
        throw ConfigError("config: curve period must equal box.L");
    if (!(disc.h_cell > 0.0) || !(disc.h_strip > 0.0) || !(disc.h_macro > 0.0))
        throw ConfigError("config: mesh sizes must be positive");
    if (disc.h_micro_per_pore < 1)
        throw ConfigError("config: h_micro_per_pore must be >= 1");
    if (sampling.x1_points < 4)
        throw ConfigError("config: x1_points must be >= 4");
    if (strip.n_pore_layers < 2)
        throw ConfigError("config: n_pore_layers must be >= 2");
    if (strip.top_height < 1.0)
        throw ConfigError("config: top_height must be >= 1");
    if (sweep.eps_list.empty()) throw ConfigError("config: empty eps list");
    for (std::size_t i = 0; i < sweep.eps_list.size(); ++i) {
        const double eps = sweep.eps_list[i];
        if (!(eps > 0.0)) throw ConfigError("config: eps must be positive");
        const double q = box.L / eps;
        if (std::abs(q - std::lround(q)) > 1e-9)
            throw ConfigError("config: L/eps must be an integer for every eps");
        const double r = box.K_depth / eps;
        if (std::abs(r - std::lround(r)) > 1e-9)
            throw ConfigError("config: K_depth/eps must be an integer for every eps");
        if (i > 0 && !(eps < sweep.eps_list[i - 1]))
            throw ConfigError("config: eps list must be strictly decreasing");
    }
    inclusion.validate();
}

std::vector<double> WorkbenchConfig::x1_grid() const {
    std::vector<double> g(sampling.x1_points);
    for (int i = 0; i < sampling.x1_points; ++i)
        g[i] = box.L * i / sampling.x1_points;
    return g;
}

namespace {

json to_json(const WorkbenchConfig& c) {
    json j;
    j["version"] = c.version;
    j["curve"] = {{"L", c.curve.period()},
                  {"cos", c.curve.cos_amplitudes()},
                  {"sin", c.curve.sin_amplitudes()}};
    json inc;
    inc["kind"] =
        c.inclusion.kind == InclusionSpec::Kind::circle ? "circle" : "smooth-star";
    inc["center"] = {c.inclusion.center.x, c.inclusion.center.y};
    inc["radius"] = c.inclusion.radius;
    if (c.inclusion.kind == InclusionSpec::Kind::smooth_star) {
        inc["cos"] = c.inclusion.star_cos;
        inc["sin"] = c.inclusion.star_sin;
    }
    j["inclusion"] = inc;
    j["box"] = {{"L", c.box.L}, {"h_free", c.box.h_free}, {"K_depth", c.box.K_depth}};
    j["force"] = {{"kind", c.force.kind == ForceSpec::Kind::constant ? "constant"
                                                                     : "trig"},
                  {"cx", c.force.cx},
                  {"cy", c.force.cy},
                  {"ax", c.force.ax},
                  {"ay", c.force.ay}};
    j["discretization"] = {{"h_cell", c.disc.h_cell},
                           {"h_strip", c.disc.h_strip},
                           {"h_macro", c.disc.h_macro},
                           {"h_micro_per_pore", c.disc.h_micro_per_pore}};
    j["strip"] = {{"n_pore_layers", c.strip.n_pore_layers},
                  {"top_height", c.strip.top_height}};
    j["sampling"] = {{"x1_points", c.sampling.x1_points}};
    j["sweep"] = {{"eps_list", c.sweep.eps_list}};
    j["tolerances"] = {{"solver_residual", c.tol.solver_residual},
                       {"spd_rel", c.tol.spd_rel},
                       {"compat_rel", c.tol.compat_rel}};
    return j;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

}  // namespace

WorkbenchConfig WorkbenchConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: JSON parse error: ") + e.what());
    }
    WorkbenchConfig c;
    try {
        c.version = get_or(j, "version", 1);
        if (j.contains("curve")) {
            const auto& jc = j.at("curve");
            c.curve = CurveSpec(get_or(jc, "L", 1.0),
                               get_or(jc, "cos", std::vector<double>{}),
                               get_or(jc, "sin", std::vector<double>{}));
        }
        if (j.contains("inclusion")) {
            const auto& ji = j.at("inclusion");
            const std::string kind = get_or<std::string>(ji, "kind", "circle");
            if (kind == "circle")
                c.inclusion.kind = InclusionSpec::Kind::circle;
            else if (kind == "smooth-star")
                c.inclusion.kind = InclusionSpec::Kind::smooth_star;
            else
                throw ConfigError("config: unknown inclusion kind " + kind);
            if (ji.contains("center")) {
                const auto ctr = ji.at("center").get<std::vector<double>>();
                if (ctr.size() != 2)
                    throw ConfigError("config: inclusion center needs 2 entries");
                c.inclusion.center = {ctr[0], ctr[1]};
            }
            c.inclusion.radius = get_or(ji, "radius", 0.25);
            c.inclusion.star_cos = get_or(ji, "cos", std::vector<double>{});
            c.inclusion.star_sin = get_or(ji, "sin", std::vector<double>{});
        }
        if (j.contains("box")) {
            const auto& jb = j.at("box");
            c.box.L = get_or(jb, "L", 1.0);
            c.box.h_free = get_or(jb, "h_free", 0.5);
            c.box.K_depth = get_or(jb, "K_depth", 0.5);
        }
        if (j.contains("force")) {
            const auto& jf = j.at("force");
            const std::string kind = get_or<std::string>(jf, "kind", "constant");
            if (kind == "constant")
                c.force.kind = ForceSpec::Kind::constant;
            else if (kind == "trig")
                c.force.kind = ForceSpec::Kind::trig;
            else
                throw ConfigError("config: unknown force kind " + kind);
            c.force.cx = get_or(jf, "cx", 1.0);
            c.force.cy = get_or(jf, "cy", 0.0);
            c.force.ax = get_or(jf, "ax", 0.0);
            c.force.ay = get_or(jf, "ay", 0.0);
        }
        if (j.contains("discretization")) {
            const auto& jd = j.at("discretization");
            c.disc.h_cell = get_or(jd, "h_cell", 0.05);
            c.disc.h_strip = get_or(jd, "h_strip", 1.0 / 16.0);
            c.disc.h_macro = get_or(jd, "h_macro", 1.0 / 32.0);
            c.disc.h_micro_per_pore = get_or(jd, "h_micro_per_pore", 8);
        }
        if (j.contains("strip")) {
            const auto& js = j.at("strip");
            c.strip.n_pore_layers = get_or(js, "n_pore_layers", 6);
            c.strip.top_height = get_or(js, "top_height", 3.0);
        }
        if (j.contains("sampling"))
            c.sampling.x1_points = get_or(j.at("sampling"), "x1_points", 16);
        if (j.contains("sweep"))
            c.sweep.eps_list = get_or(j.at("sweep"), "eps_list",
                                      std::vector<double>{0.25, 0.125, 0.0625});
        if (j.contains("tolerances")) {
            const auto& jt = j.at("tolerances");
            c.tol.solver_residual = get_or(jt, "solver_residual", 1e-10);
            c.tol.spd_rel = get_or(jt, "spd_rel", 1e-8);
            c.tol.compat_rel = get_or(jt, "compat_rel", 1e-6);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: invalid field: ") + e.what());
    }
    return c;
}

WorkbenchConfig WorkbenchConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string WorkbenchConfig::to_json_text() const {
    return to_json(*this).dump(2);
}

std::string WorkbenchConfig::subset_hash(
    const std::vector<std::string>& fields) const {
    const json j = to_json(*this);
    json sub;
    for (const auto& f : fields) {
        const char* key = f == "disc" ? "discretization" : f.c_str();
        if (j.contains(key)) sub[key] = j.at(key);
    }
    const std::string s = sub.dump();
    // FNV-1a 64-bit
    std::uint64_t h = 1469598103934665603ull;
    for (const unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace slipflow
