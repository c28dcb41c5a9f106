#include "slipflow/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "slipflow/blayer.hpp"
#include "slipflow/cell.hpp"
#include "slipflow/dns.hpp"
#include "slipflow/effective.hpp"
#include "slipflow/errors.hpp"
#include "slipflow/identities.hpp"

namespace slipflow {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("pipeline: cannot write " + path.string());
    out << content;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("pipeline: missing stage output " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(cell);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_field(const fs::path& path, const MixedField& f) {
    std::ostringstream os;
    f.space->mesh().write_text(os);
    os << "# velocity: entity ux uy (vertices then edge midpoints)\n";
    os << "velocity " << f.ux.size() << "\n";
    for (std::size_t i = 0; i < f.ux.size(); ++i)
        os << i << ' ' << fmt(f.ux[i]) << ' ' << fmt(f.uy[i]) << "\n";
    os << "# pressure: vertex value\n";
    os << "pressure " << f.p.size() << "\n";
    for (std::size_t i = 0; i < f.p.size(); ++i)
        os << i << ' ' << fmt(f.p[i]) << "\n";
    write_file(path, os.str());
}

void write_scalar_field(const fs::path& path, const ScalarField& f) {
    std::ostringstream os;
    f.space->mesh().write_text(os);
    os << "# scalar: entity value (vertices then edge midpoints)\n";
    os << "scalar " << f.v.size() << "\n";
    for (std::size_t i = 0; i < f.v.size(); ++i)
        os << i << ' ' << fmt(f.v[i]) << "\n";
    write_file(path, os.str());
}

WorkbenchConfig effective_config(WorkbenchConfig cfg, const PipelineOptions& opt) {
    if (opt.deep_strip) cfg.strip.n_pore_layers *= 2;
    if (opt.fine) {
        cfg.disc.h_cell *= 0.5;
        cfg.disc.h_strip *= 0.5;
        cfg.disc.h_macro *= 0.5;
        cfg.disc.h_micro_per_pore *= 2;
    }
    return cfg;
}

struct Manifest {
    fs::path path;
    json data;

    static Manifest load(const fs::path& dir) {
        Manifest m;
        m.path = dir / "manifest.json";
        if (fs::exists(m.path)) {
            std::ifstream in(m.path);
            try {
                in >> m.data;
            } catch (...) {
                m.data = json::object();
            }
        } else {
            m.data = json::object();
        }
        return m;
    }
    bool fresh(const std::string& stage, const std::string& hash,
               const std::vector<std::string>& outputs, const fs::path& dir) const {
        if (!data.contains(stage)) return false;
        if (data.at(stage).value("hash", std::string{}) != hash) return false;
        for (const auto& o : outputs)
            if (!fs::exists(dir / o)) return false;
        return true;
    }
    void record(const std::string& stage, const std::string& hash,
                const std::vector<std::string>& outputs) {
        data[stage] = {{"hash", hash}, {"outputs", outputs}};
        write_file(path, data.dump(2));
    }
};

/// In-memory context shared across stages within one invocation; every
/// cross-stage input can also be reloaded from the stage CSVs, so cached
/// stages never need recomputation.
struct Context {
    WorkbenchConfig cfg;
    PipelineOptions opt;
    fs::path dir;
    Manifest manifest;

    std::shared_ptr<const FemSpace> space_O1, space_O2;

    std::shared_ptr<const FemSpace> o1() {
        if (!space_O1) {
            auto mesh = std::make_shared<PeriodicMesh>(
                build_rect_mesh(cfg.box.L, 0.0, cfg.box.h_free, cfg.disc.h_macro,
                                BTag::interface_s, BTag::top));
            space_O1 = std::make_shared<FemSpace>(mesh);
        }
        return space_O1;
    }
    std::shared_ptr<const FemSpace> o2() {
        if (!space_O2) {
            auto mesh = std::make_shared<PeriodicMesh>(
                build_rect_mesh(cfg.box.L, -cfg.box.K_depth, 0.0, cfg.disc.h_macro,
                                BTag::bottom, BTag::interface_s));
            space_O2 = std::make_shared<FemSpace>(mesh);
        }
        return space_O2;
    }

    std::vector<Vec2> load_stress_jump() {
        const auto rows = read_csv(dir / "stress_jump.csv");
        std::vector<Vec2> out;
        for (std::size_t i = 1; i < rows.size(); ++i)
            out.push_back({std::stod(rows[i][1]), std::stod(rows[i][2])});
        return out;
    }
    EffectiveCoefficients load_coefficients() {
        const auto perm = read_csv(dir / "permeability.csv");
        const auto bl = read_csv(dir / "boundary_layer.csv");
        std::vector<double> x1;
        std::vector<Mat2> A;
        std::vector<Vec2> cbl;
        std::vector<double> cblo;
        for (std::size_t i = 1; i < perm.size(); ++i) {
            x1.push_back(std::stod(perm[i][0]));
            A.push_back(Mat2(std::stod(perm[i][1]), std::stod(perm[i][2]),
                             std::stod(perm[i][3]), std::stod(perm[i][4])));
        }
        for (std::size_t i = 1; i < bl.size(); ++i) {
            cbl.push_back({std::stod(bl[i][2]), std::stod(bl[i][3])});
            cblo.push_back(std::stod(bl[i][4]));
        }
        if (cbl.size() != x1.size())
            throw ConfigError("pipeline: permeability/boundary_layer size mismatch");
        return EffectiveCoefficients(cfg.box.L, x1, cbl, cblo, A);
    }
};

using StageFn = std::vector<std::string> (*)(Context&);

std::vector<std::string> stage_transform(Context& ctx) {
    std::ostringstream os;
    os << "identity,residual\n";
    const IdentityReport rep = verify_identities(ctx.cfg.curve, 64);
    for (const auto& e : rep.entries) os << e.name << ',' << fmt(e.residual) << "\n";
    write_file(ctx.dir / "transform_residuals.csv", os.str());
    return {"transform_residuals.csv"};
}

std::vector<std::string> stage_cell(Context& ctx) {
    const auto samples = permeability(ctx.cfg.curve, ctx.cfg.x1_grid(),
                                      ctx.cfg.inclusion, ctx.cfg.disc.h_cell);
    std::ostringstream os;
    os << "x1,A11,A12,A21,A22,eig_lo,eig_hi\n";
    for (const auto& s : samples)
        os << fmt(s.x1) << ',' << fmt(s.A(0, 0)) << ',' << fmt(s.A(0, 1)) << ','
           << fmt(s.A(1, 0)) << ',' << fmt(s.A(1, 1)) << ',' << fmt(s.eig_lo)
           << ',' << fmt(s.eig_hi) << "\n";
    write_file(ctx.dir / "permeability.csv", os.str());
    return {"permeability.csv"};
}

std::vector<std::string> stage_u0(Context& ctx) {
    const BodyForce f = ctx.cfg.force.make(ctx.cfg.box.L);
    const MixedField u0 = solve_u0(ctx.cfg.curve, f, ctx.o1());
    const auto grid = ctx.cfg.x1_grid();
    const auto kbl = stress_jump(u0, ctx.cfg.curve, grid);
    std::ostringstream os;
    os << "x1,Kbl1,Kbl2\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
        os << fmt(grid[i]) << ',' << fmt(kbl[i].x) << ',' << fmt(kbl[i].y) << "\n";
    write_file(ctx.dir / "stress_jump.csv", os.str());
    write_field(ctx.dir / "u0_field.txt", u0);
    return {"stress_jump.csv", "u0_field.txt"};
}

std::vector<std::string> stage_bl(Context& ctx) {
    const auto grid = ctx.cfg.x1_grid();
    const auto kbl = ctx.load_stress_jump();
    if (kbl.size() != grid.size())
        throw ConfigError("pipeline: stress_jump.csv does not match the x1 grid");

    StripWorkspace ws(ctx.cfg.inclusion, ctx.cfg.strip.n_pore_layers,
                      ctx.cfg.strip.top_height, ctx.cfg.disc.h_strip);

    // Shared truncation estimate: depth doubling at the sample with the
    // largest jump magnitude.
    std::size_t rep = 0;
    for (std::size_t i = 0; i < kbl.size(); ++i)
        if (kbl[i].norm() > kbl[rep].norm()) rep = i;
    double delta = 0.0;
    truncation_study(ctx.cfg.curve, grid[rep], kbl[rep], ctx.cfg.inclusion,
                     {ctx.cfg.strip.n_pore_layers, 2 * ctx.cfg.strip.n_pore_layers},
                     ctx.cfg.strip.top_height, ctx.cfg.disc.h_strip, &delta);

    std::ostringstream os;
    os << "x1,gprime,Cbl1,Cbl2,Cbl_omega,decay_rate,R2,truncation_delta\n";
    std::ostringstream prof;
    prof << "depth,log_grad_norm\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        BoundaryLayerSolution sol = ws.solve(ctx.cfg.curve, grid[i], kbl[i]);
        sol.truncation_delta = delta;
        os << fmt(sol.x1) << ',' << fmt(sol.gprime) << ',' << fmt(sol.Cbl.x)
           << ',' << fmt(sol.Cbl.y) << ',' << fmt(sol.Cbl_omega) << ','
           << fmt(sol.decay_rate) << ',' << fmt(sol.decay_r2) << ','
           << fmt(sol.truncation_delta) << "\n";
        if (i == 0) {
            for (int k = 2; k <= ctx.cfg.strip.n_pore_layers - 1; ++k) {
                const double e2 = integrate_band(
                    sol.field, -k,
                    [](Vec2, Vec2, const Mat2& J, double) {
                        return J.frobenius_sq();
                    });
                prof << k << ',' << fmt(0.5 * std::log(std::max(e2, 1e-300)))
                     << "\n";
            }
        }
    }
    write_file(ctx.dir / "boundary_layer.csv", os.str());
    write_file(ctx.dir / "decay_profile.csv", prof.str());
    return {"boundary_layer.csv", "decay_profile.csv"};
}

std::vector<std::string> stage_effective(Context& ctx) {
    const BodyForce f = ctx.cfg.force.make(ctx.cfg.box.L);
    const EffectiveCoefficients coeffs = ctx.load_coefficients();
    const double eps = ctx.cfg.sweep.eps_list.front();
    const EffectiveSolution sol =
        solve_effective(ctx.cfg.curve, f, coeffs, eps, ctx.o1(), ctx.o2());
    const auto [profile, M] = slip_and_massflow(sol.ueff, ctx.cfg.curve);

    std::ostringstream os;
    os << "x1,slip_tangential\n";
    for (std::size_t i = 0; i < profile.x1.size(); ++i)
        os << fmt(profile.x1[i]) << ',' << fmt(profile.slip[i]) << "\n";
    write_file(ctx.dir / "slip_profile.csv", os.str());
    write_file(ctx.dir / "massflow.csv",
               "eps,M_eff\n" + fmt(eps) + "," + fmt(M) + "\n");
    write_field(ctx.dir / "ueff_field.txt", sol.ueff);
    write_scalar_field(ctx.dir / "darcy_field.txt", sol.darcy);
    return {"slip_profile.csv", "massflow.csv", "ueff_field.txt",
            "darcy_field.txt"};
}

std::vector<std::string> stage_dns(Context& ctx) {
    const BodyForce f = ctx.cfg.force.make(ctx.cfg.box.L);
    const double eps = ctx.cfg.sweep.eps_list.front();
    MicroMeshParams params{ctx.cfg.inclusion,          ctx.cfg.box.L,
                           ctx.cfg.box.h_free,          ctx.cfg.box.K_depth,
                           ctx.cfg.disc.h_micro_per_pore, ctx.cfg.disc.h_macro};
    const MixedField ueps = solve_eps_problem(ctx.cfg.curve, f, eps, params);
    write_field(ctx.dir / "micro_field.txt", ueps);
    const double M = integrate_region(
        ueps, Region::above_s,
        [&](Vec2 x, Vec2 u, const Mat2&, double) {
            return u.x + ctx.cfg.curve.dg(x.x) * u.y;
        });
    write_file(ctx.dir / "micro_massflow.csv",
               "eps,M_eps\n" + fmt(eps) + "," + fmt(M) + "\n");
    return {"micro_field.txt", "micro_massflow.csv"};
}

std::vector<std::string> stage_sweep(Context& ctx) {
    const BodyForce f = ctx.cfg.force.make(ctx.cfg.box.L);
    const EffectiveCoefficients coeffs = ctx.load_coefficients();
    MicroMeshParams params{ctx.cfg.inclusion,          ctx.cfg.box.L,
                           ctx.cfg.box.h_free,          ctx.cfg.box.K_depth,
                           ctx.cfg.disc.h_micro_per_pore, ctx.cfg.disc.h_macro};
    const ConvergenceReport rep =
        sweep_fit(ctx.cfg.curve, f, coeffs, ctx.cfg.sweep.eps_list, params,
                  ctx.o1(), ctx.o2(), ctx.opt.jobs);

    std::ostringstream os;
    os << "eps,err_u_L2_O1,err_u_H12_O1,err_p_L1_O1,err_gradu_L1_O1,"
          "err_weighted_grad,err_weighted_p,err_u_L2_Sigma,err_u_Hm12_Sigma,"
          "err_p_Hm12_Sigma,u_L2_O2eps,u_ratio_O2,darcy_mismatch,M_eps,M_eff\n";
    for (const auto& r : rep.records)
        os << fmt(r.eps) << ',' << fmt(r.err_u_L2_O1) << ',' << fmt(r.err_u_H12_O1)
           << ',' << fmt(r.err_p_L1_O1) << ',' << fmt(r.err_gradu_L1_O1) << ','
           << fmt(r.err_weighted_grad) << ',' << fmt(r.err_weighted_p) << ','
           << fmt(r.err_u_L2_Sigma) << ',' << fmt(r.err_u_Hm12_Sigma) << ','
           << fmt(r.err_p_Hm12_Sigma) << ',' << fmt(r.u_L2_O2eps) << ','
           << fmt(r.u_ratio_O2) << ',' << fmt(r.darcy_mismatch) << ','
           << fmt(r.M_eps) << ',' << fmt(r.M_eff) << "\n";
    write_file(ctx.dir / "dns_norms.csv", os.str());

    std::ostringstream rs;
    rs << "name,slope,r2,monotone\n";
    for (const auto& r : rep.rates)
        rs << r.name << ',' << fmt(r.slope) << ',' << fmt(r.r2) << ','
           << (r.monotone ? 1 : 0) << "\n";
    write_file(ctx.dir / "dns_rates.csv", rs.str());
    return {"dns_norms.csv", "dns_rates.csv"};
}

struct StageDef {
    const char* name;
    std::vector<std::string> deps;  ///< config subsets in the cache key
    std::vector<const char*> upstream;
    StageFn fn;
};

const std::vector<StageDef>& stage_table() {
    static const std::vector<StageDef> table = {
        {"transform", {"curve"}, {}, &stage_transform},
        {"cell",
         {"curve", "inclusion", "box", "disc", "sampling"},
         {},
         &stage_cell},
        {"u0", {"curve", "box", "force", "disc", "sampling"}, {}, &stage_u0},
        {"bl",
         {"curve", "inclusion", "box", "force", "disc", "strip", "sampling"},
         {"u0"},
         &stage_bl},
        {"effective",
         {"curve", "inclusion", "box", "force", "disc", "strip", "sampling",
          "sweep"},
         {"cell", "bl"},
         &stage_effective},
        {"dns",
         {"curve", "inclusion", "box", "force", "disc", "sweep"},
         {},
         &stage_dns},
        {"sweep",
         {"curve", "inclusion", "box", "force", "disc", "strip", "sampling",
          "sweep"},
         {"cell", "bl"},
         &stage_sweep},
    };
    return table;
}

}  // namespace

std::vector<StageResult> run_pipeline(const WorkbenchConfig& config,
                                      const PipelineOptions& options,
                                      std::vector<std::string> stages) {
    config.validate();
    const WorkbenchConfig cfg = effective_config(config, options);

    Context ctx{cfg, options, fs::path(options.out_dir),
                Manifest{}, nullptr, nullptr};
    fs::create_directories(ctx.dir);
    ctx.manifest = Manifest::load(ctx.dir);

    if (stages.empty())
        for (const auto& s : stage_table()) stages.push_back(s.name);

    // Expand upstream dependencies, preserving table order.
    std::set<std::string> want;
    std::function<void(const std::string&)> require = [&](const std::string& n) {
        for (const auto& s : stage_table()) {
            if (s.name != n) continue;
            for (const auto* up : s.upstream) require(up);
            want.insert(n);
            return;
        }
        throw ConfigError("pipeline: unknown stage " + n);
    };
    for (const auto& s : stages) require(s);

    std::vector<StageResult> results;
    std::map<std::string, std::string> stage_hash;
    for (const auto& s : stage_table()) {
        // Upstream hashes chain so downstream stages see upstream changes.
        std::string key = cfg.subset_hash(s.deps);
        for (const auto* up : s.upstream) {
            const auto it = stage_hash.find(up);
            if (it != stage_hash.end()) key += ":" + it->second;
        }
        if (options.deep_strip) key += ":deep";
        if (options.fine) key += ":fine";
        stage_hash[s.name] = key;
        if (!want.count(s.name)) continue;

        // Probe the manifest with the known output list.
        StageResult r;
        r.name = s.name;
        const json prev = ctx.manifest.data.value(s.name, json::object());
        std::vector<std::string> prev_outputs =
            prev.value("outputs", std::vector<std::string>{});
        if (!prev_outputs.empty() &&
            ctx.manifest.fresh(s.name, key, prev_outputs, ctx.dir)) {
            r.cached = true;
            r.outputs = prev_outputs;
        } else {
            try {
                r.outputs = s.fn(ctx);
            } catch (const std::exception& e) {
                throw NumericalError("pipeline stage '" + std::string(s.name) +
                                     "' failed: " + e.what());
            }
            ctx.manifest.record(s.name, key, r.outputs);
        }
        results.push_back(std::move(r));
    }
    return results;
}

std::vector<std::string> export_plots(const std::string& artifact_dir) {
    const fs::path dir(artifact_dir);
    std::vector<std::string> written;

    {
        const auto rows = read_csv(dir / "decay_profile.csv");
        std::ostringstream os;
        os << "# boundary-layer decay: pore-row depth vs log ||grad beta||_L2\n";
        for (std::size_t i = 1; i < rows.size(); ++i)
            os << rows[i][0] << ' ' << rows[i][1] << "\n";
        write_file(dir / "plot_decay.dat", os.str());
        written.push_back("plot_decay.dat");
    }
    {
        const auto rows = read_csv(dir / "boundary_layer.csv");
        std::ostringstream os;
        os << "# slip coefficients: x1 vs Cbl1 Cbl2 Cbl_omega\n";
        for (std::size_t i = 1; i < rows.size(); ++i)
            os << rows[i][0] << ' ' << rows[i][2] << ' ' << rows[i][3] << ' '
               << rows[i][4] << "\n";
        write_file(dir / "plot_cbl_vs_x1.dat", os.str());
        written.push_back("plot_cbl_vs_x1.dat");
    }
    {
        const auto rows = read_csv(dir / "dns_norms.csv");
        std::ostringstream os;
        os << "# eps-convergence (log-log): eps";
        for (std::size_t c = 1; c < rows[0].size(); ++c) os << ' ' << rows[0][c];
        os << "\n";
        for (std::size_t i = 1; i < rows.size(); ++i) {
            for (std::size_t c = 0; c < rows[i].size(); ++c)
                os << (c ? " " : "") << rows[i][c];
            os << "\n";
        }
        write_file(dir / "plot_eps_convergence.dat", os.str());
        written.push_back("plot_eps_convergence.dat");
    }
    return written;
}

}  // namespace slipflow
