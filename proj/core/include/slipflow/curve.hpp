#pragma once

#include <vector>

#include "slipflow/vec2.hpp"

namespace slipflow {

/// L-periodic interface curve x2 = g(x1) as a truncated Fourier series,
///
///   g(z) = sum_k cos_amp[k-1] * cos(2*pi*k*z/L) + sin_amp[k-1] * sin(2*pi*k*z/L),
///
/// which gives exact periodicity and closed-form derivatives of any order.
/// An empty amplitude list is the flat interface g == 0.
class CurveSpec {
  public:
    CurveSpec() = default;
    CurveSpec(double period, std::vector<double> cos_amp, std::vector<double> sin_amp);

    /// Flat interface with period L.
    static CurveSpec flat(double period = 1.0) { return CurveSpec(period, {}, {}); }
    /// g(z) = a * sin(2*pi*z/L).
    static CurveSpec sine(double amplitude, double period = 1.0);

    double period() const { return period_; }
    const std::vector<double>& cos_amplitudes() const { return cos_amp_; }
    const std::vector<double>& sin_amplitudes() const { return sin_amp_; }

    /// g and its derivatives; evaluation reduces z mod L, so periodicity is exact.
    double g(double z) const { return eval(z, 0); }
    double dg(double z) const { return eval(z, 1); }
    double ddg(double z) const { return eval(z, 2); }
    double dddg(double z) const { return eval(z, 3); }

    bool is_flat() const { return cos_amp_.empty() && sin_amp_.empty(); }

  private:
    double eval(double z, int order) const;

    double period_ = 1.0;
    std::vector<double> cos_amp_;
    std::vector<double> sin_amp_;
};

/// Jacobian data of the interface-flattening map psi(z) = (z1, z2 + g(z1))
/// at a fixed z1.  F = [[1,0],[g',1]], det F = 1; `metric` is F^{-1} F^{-T},
/// the coefficient of the transformed Stokes operator, with eigenvalues
/// lambda_{1,2} = 1 + g'^2/2 +- sqrt(g'^2 + g'^4/4), lambda_1 * lambda_2 = 1.
struct JacobianSample {
    double gprime = 0.0;
    Mat2 F = Mat2::identity();
    Mat2 F_inv = Mat2::identity();
    Mat2 F_invT = Mat2::identity();
    Mat2 metric = Mat2::identity();
    double eig_lo = 1.0;
    double eig_hi = 1.0;
};

/// Sample the Jacobian at z1 (z2 never enters: F depends on z1 only).
JacobianSample jacobian(const CurveSpec& spec, double z1);

/// Jacobian data for a frozen slope g' (used by the parameter-dependent
/// cell and boundary-layer problems, which see x1 only through g'(x1)).
JacobianSample jacobian_from_slope(double gprime);

/// Reference -> physical: (z1, z2) -> (z1, z2 + g(z1)).
Vec2 map_point(const CurveSpec& spec, Vec2 z);
/// Physical -> reference, exact inverse of map_point.
Vec2 unmap_point(const CurveSpec& spec, Vec2 x);

struct TransformedFrame {
    Vec2 normal;   ///< F^{-T} nu, normalized
    Vec2 tangent;  ///< F tau with tau = rot90(nu)... normalized; normal.tangent = 0
};

/// Push a unit normal through the transformation: the physical unit normal
/// is F^{-T} nu / |F^{-T} nu| and the unit tangent is F tau / |F tau|.
TransformedFrame transform_vectors(const CurveSpec& spec, double x1, Vec2 nu);

}  // namespace slipflow
