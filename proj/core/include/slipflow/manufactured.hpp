#pragma once

#include <vector>

#include "slipflow/curve.hpp"
#include "slipflow/stokes.hpp"

namespace slipflow {

/// Smooth exact solution of the transformed Stokes system for a given curve:
/// velocity built as the transformed curl of a trigonometric stream function
/// (hence exactly transformed-divergence-free), pressure trigonometric, and
/// the body force evaluated from the strong form with analytic derivatives.
struct ManufacturedSolution {
    CurveSpec spec;

    Vec2 velocity(Vec2 z) const;
    Mat2 velocity_jacobian(Vec2 z) const;  ///< J(k,i) = d u_k / d z_i
    double pressure(Vec2 z) const;
    Vec2 force(Vec2 z) const;
};

ManufacturedSolution make_manufactured(const CurveSpec& spec);

struct RateTable {
    std::vector<double> h;
    std::vector<double> err_u_l2;
    std::vector<double> err_p_l2;
    double rate_u = 0.0;
    double rate_p = 0.0;
    double r2_u = 1.0;
    double r2_p = 1.0;
};

/// Convergence study of the solver against the manufactured solution on the
/// unit channel with Dirichlet top/bottom and periodic sides; `levels`
/// halvings starting from h = 1/8.  With a single level no rate is reported.
RateTable manufactured_convergence(const CurveSpec& spec, int levels);

}  // namespace slipflow
