#pragma once

#include <string>
#include <vector>

#include "slipflow/curve.hpp"
#include "slipflow/mesh.hpp"
#include "slipflow/stokes.hpp"

namespace slipflow {

/// Body forces come from a fixed symbolic catalog so every downstream test
/// has analytic derivatives available:
///   constant:  f = (cx, cy)
///   trig:      f = (cx + ax cos(2 pi x1 / L), cy + ay sin(2 pi x1 / L))
struct ForceSpec {
    enum class Kind { constant, trig };
    Kind kind = Kind::constant;
    double cx = 1.0, cy = 0.0;
    double ax = 0.0, ay = 0.0;

    BodyForce make(double L) const;
};

/// Workbench configuration (schema version 1).
struct WorkbenchConfig {
    int version = 1;
    CurveSpec curve;
    InclusionSpec inclusion;
    struct Box {
        double L = 1.0;
        double h_free = 0.5;
        double K_depth = 0.5;
    } box;
    ForceSpec force;
    struct Discretization {
        double h_cell = 0.05;
        double h_strip = 1.0 / 16.0;
        double h_macro = 1.0 / 32.0;
        int h_micro_per_pore = 8;
    } disc;
    struct Strip {
        int n_pore_layers = 6;
        double top_height = 3.0;
    } strip;
    struct Sampling {
        int x1_points = 16;
    } sampling;
    struct Sweep {
        std::vector<double> eps_list{0.25, 0.125, 0.0625};
    } sweep;
    struct Tolerances {
        double solver_residual = 1e-10;
        double spd_rel = 1e-8;
        double compat_rel = 1e-6;
    } tol;

    /// Throws ConfigError on any violated invariant (L/eps integral,
    /// positive mesh sizes, x1_points >= 4, inclusion margin).
    void validate() const;

    std::vector<double> x1_grid() const;

    static WorkbenchConfig from_json_text(const std::string& text);
    static WorkbenchConfig load(const std::string& path);
    std::string to_json_text() const;

    /// Content hash of the fields a pipeline stage depends on; used for
    /// stage-level caching.  `fields` names config subsets: "curve",
    /// "inclusion", "box", "force", "disc", "strip", "sampling", "sweep".
    std::string subset_hash(const std::vector<std::string>& fields) const;
};

}  // namespace slipflow
