#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "slipflow/curve.hpp"
#include "slipflow/interp.hpp"
#include "slipflow/stokes.hpp"

namespace slipflow {

/// Interface and permeability coefficients sampled over one period of x1
/// and interpolated by periodic cubic splines.  All of them depend on x1
/// only through g'(x1).
class EffectiveCoefficients {
  public:
    EffectiveCoefficients() = default;
    EffectiveCoefficients(double L, std::vector<double> x1,
                          std::vector<Vec2> cbl, std::vector<double> cbl_omega,
                          std::vector<Mat2> A);

    Vec2 cbl(double x1) const { return {cbl1_(x1), cbl2_(x1)}; }
    double cbl_omega(double x1) const { return cblo_(x1); }
    Mat2 permeability(double x1) const {
        return {a11_(x1), a12_(x1), a21_(x1), a22_(x1)};
    }
    double period() const { return cbl1_.period(); }
    const std::vector<double>& grid() const { return grid_; }
    const std::vector<Vec2>& cbl_samples() const { return cbl_samples_; }

    /// int_Sigma Cbl . F^{-T} e2 dx, the solvability compatibility integral
    /// of the slip data (vanishes by the boundary-layer flux identity).
    double compatibility_integral(const CurveSpec& spec) const;

  private:
    std::vector<double> grid_;
    std::vector<Vec2> cbl_samples_;
    PeriodicSpline cbl1_, cbl2_, cblo_;
    PeriodicSpline a11_, a12_, a21_, a22_;
};

/// Continuous scalar P2 field (the Darcy pressure).
struct ScalarField {
    std::shared_ptr<const FemSpace> space;
    std::vector<double> v;  ///< per P2 entity

    double value(int t, double l1, double l2, double l3) const;
    Vec2 gradient(int t, double l1, double l2, double l3) const;
};

/// Force-elimination problem: transformed Stokes on Omega_1 with no-slip on
/// the interface and the top wall, periodic sides, zero-mean pressure.
MixedField solve_u0(const CurveSpec& spec, const BodyForce& f,
                    std::shared_ptr<const FemSpace> space_O1);

/// Interface shear data K^bl(x1) = (grad u0)^T F^{-1}F^{-T} e2 at (x1, 0+),
/// recovered from the first element layer by local least-squares patches.
std::vector<Vec2> stress_jump(const MixedField& u0, const CurveSpec& spec,
                              const std::vector<double>& x1_grid);

/// Effective free-fluid problem with the slip condition u = -eps Cbl on the
/// interface.  Throws NumericalError when the slip data violates the
/// compatibility integral beyond 1e-6 relative.
MixedField solve_effective_fluid(const CurveSpec& spec, const BodyForce& f,
                                 const EffectiveCoefficients& coeffs, double eps,
                                 std::shared_ptr<const FemSpace> space_O1);

/// Effective Darcy pressure on Omega_2: continuous P2 Galerkin for
///   div(F^{-1} A (f - F^{-T} grad p)) = 0,
/// Dirichlet trace on the interface, no-flux bottom, periodic sides.
ScalarField solve_darcy(const CurveSpec& spec, const BodyForce& f,
                        const EffectiveCoefficients& coeffs,
                        const std::function<double(double)>& sigma_trace,
                        std::shared_ptr<const FemSpace> space_O2);

/// Darcy flux A(f - F^{-T} grad p) at a point of element t.
Vec2 darcy_flux(const ScalarField& p, const CurveSpec& spec, const BodyForce& f,
                const EffectiveCoefficients& coeffs, int t, double l1, double l2,
                double l3);

struct SlipProfile {
    std::vector<double> x1;
    std::vector<double> slip;  ///< u_eff . F e1 on Sigma
};

/// Tangential slip trace on Sigma and the effective mass flow
/// M_eff = int_{Omega_1} u . F e1 dx.
std::pair<SlipProfile, double> slip_and_massflow(const MixedField& ueff,
                                                 const CurveSpec& spec);

/// One epsilon's effective solution (free fluid + Darcy + mass flow).
struct EffectiveSolution {
    double eps = 0.0;
    MixedField ueff;
    ScalarField darcy;
    double M_eff = 0.0;
};

EffectiveSolution solve_effective(const CurveSpec& spec, const BodyForce& f,
                                  const EffectiveCoefficients& coeffs, double eps,
                                  std::shared_ptr<const FemSpace> space_O1,
                                  std::shared_ptr<const FemSpace> space_O2);

}  // namespace slipflow
