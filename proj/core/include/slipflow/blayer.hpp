#pragma once

#include <memory>
#include <vector>

#include "slipflow/curve.hpp"
#include "slipflow/fit.hpp"
#include "slipflow/stokes.hpp"

namespace slipflow {

/// Boundary-layer solution on the truncated strip for one interface slope
/// and stress-jump vector Kbl, with the extracted decay data.
///
/// The pressure field is normalized so the deep porous plane average is
/// zero, which is the normalization under which the Darcy trace relation
/// uses Cbl_omega directly; kappa_inf records the mean that was removed.
struct BoundaryLayerSolution {
    double x1 = 0.0;
    double gprime = 0.0;
    Vec2 Kbl{0.0, 0.0};
    MixedField field;
    Vec2 Cbl{0.0, 0.0};
    double Cbl_omega = 0.0;
    double Cbl_omega_interface = 0.0;  ///< literal S-trace read (diagnostic)
    double kappa_inf = 0.0;
    double decay_rate = 0.0;
    double decay_r2 = 1.0;
    double truncation_delta = 0.0;
};

struct TruncationRow {
    int depth;
    Vec2 Cbl;
    double Cbl_omega;
};

/// Shared strip discretization; per distinct slope one factorization serves
/// the two canonical unit-traction solves, and any Kbl is a superposition.
class StripWorkspace {
  public:
    StripWorkspace(const InclusionSpec& inclusion, int n_pore_layers,
                   double top_height, double h);

    std::shared_ptr<const FemSpace> space() const { return space_; }
    int n_pore_layers() const { return n_layers_; }
    double top_height() const { return top_height_; }

    /// Solve the boundary-layer problem at slope g'(x1) with jump Kbl.
    BoundaryLayerSolution solve(const CurveSpec& spec, double x1, Vec2 Kbl) const;
    BoundaryLayerSolution solve_at_slope(double gprime, Vec2 Kbl) const;

  private:
    struct Canonical {
        double gprime;
        MixedField e1, e2;
    };
    const Canonical& canonical(double gprime) const;

    std::shared_ptr<const FemSpace> space_;
    int n_layers_;
    double top_height_;
    InclusionSpec inclusion_;
    double h_;
    mutable std::vector<Canonical> cache_;
};

/// Direct (non-superposed) solve; used by the linearity tests and the
/// truncation study.
BoundaryLayerSolution solve_bl(const CurveSpec& spec, double x1, Vec2 Kbl,
                               const InclusionSpec& inclusion, int n_pore_layers,
                               double top_height, double h);

/// Decay constants of a solved layer: Cbl from the interface tangential
/// line integral combined with the conservation-exact normal flux, and
/// Cbl_omega from the far-field pressure plane average (paper
/// normalization).  Returned pair: (Cbl, Cbl_omega).
std::pair<Vec2, double> decay_constants(const BoundaryLayerSolution& sol);

/// Velocity flux through the pore row at depth k (row band functional; the
/// discrete divergence constraint makes this exactly zero).
double flux_at_depth(const BoundaryLayerSolution& sol, int k);

/// Plane average of the pressure over the structured band containing
/// height y (above the interface).
double pressure_plane_average(const BoundaryLayerSolution& sol, double y);

/// Gradient-norm decay across the pore rows: least-squares slope of
/// log ||grad beta||_{L2(Z_k)} against depth over the interior layers.
/// Zero data reports rate = +inf with goodness 1.
LineFit decay_rate_fit(const BoundaryLayerSolution& sol);

/// Cbl as a function of strip depth, and the relative change on the deepest
/// doubling pair.
std::vector<TruncationRow> truncation_study(const CurveSpec& spec, double x1,
                                            Vec2 Kbl,
                                            const InclusionSpec& inclusion,
                                            const std::vector<int>& depths,
                                            double top_height, double h,
                                            double* delta_out = nullptr);

}  // namespace slipflow
