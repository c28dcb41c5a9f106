#pragma once

#include <string>
#include <vector>

#include "slipflow/effective.hpp"
#include "slipflow/meshgen.hpp"
#include "slipflow/stokes.hpp"

namespace slipflow {

struct MicroMeshParams {
    InclusionSpec inclusion;
    double L = 1.0;
    double h_free = 0.5;
    double K_depth = 0.5;
    int elems_per_pore_diameter = 8;
    double h_macro = 1.0 / 32.0;
};

/// Full microscale solve on the eps-periodic composite domain: no-slip on
/// pores and outer walls, periodic sides, zero-mean pressure.
MixedField solve_eps_problem(const CurveSpec& spec, const BodyForce& f,
                             double eps, const MicroMeshParams& params);

/// Every error norm of the error estimates, for one eps.
struct EpsRecord {
    double eps = 0.0;
    double err_u_L2_O1 = 0.0;
    double err_u_H12_O1 = 0.0;  ///< interpolation norm ||.||_L2^1/2 ||.||_H1^1/2
    double err_p_L1_O1 = 0.0;
    double err_gradu_L1_O1 = 0.0;
    double err_weighted_grad = 0.0;  ///< || |x2|^1/2 grad(u_eps - u_eff) ||_L2
    double err_weighted_p = 0.0;
    double err_u_L2_Sigma = 0.0;
    double err_u_Hm12_Sigma = 0.0;
    double err_p_Hm12_Sigma = 0.0;
    double u_L2_O2eps = 0.0;
    double u_ratio_O2 = 0.0;  ///< ||u_eps||_L2(O2eps) / eps^2
    double darcy_mismatch = 0.0;
    double M_eps = 0.0;
    double M_eff = 0.0;
};

/// Compare a microscale solution against the effective model: the effective
/// fields are interpolated onto the (finer) microscale mesh, pressures are
/// aligned to zero mean over Omega_1, and the interface norms use the
/// periodic Fourier-multiplier definition of H^{-1/2} on 256 trace samples.
EpsRecord error_report(const MixedField& ueps, const EffectiveSolution& eff,
                       const CurveSpec& spec, const BodyForce& f,
                       const EffectiveCoefficients& coeffs);

/// Fractional interface norm from uniform samples of a periodic function:
/// ||v||^2 = L sum_k (1 + k^2)^(+-1/2) |c_k|^2 with c_k the Fourier
/// coefficients; `order` is +1/2 or -1/2.
double fourier_trace_norm(const std::vector<double>& samples, double L,
                          double order);

struct FittedRate {
    std::string name;
    double slope = 0.0;
    double r2 = 1.0;
    bool monotone = true;
};

struct ConvergenceReport {
    std::vector<EpsRecord> records;
    std::vector<FittedRate> rates;
    const FittedRate& rate(const std::string& name) const;
};

/// Epsilon sweep: solves the microscale problem for each eps (the effective
/// model is rebuilt per eps from the shared coefficients) and fits log-log
/// rates for each norm.
ConvergenceReport sweep_fit(const CurveSpec& spec, const BodyForce& f,
                            const EffectiveCoefficients& coeffs,
                            const std::vector<double>& eps_list,
                            const MicroMeshParams& params,
                            std::shared_ptr<const FemSpace> space_O1,
                            std::shared_ptr<const FemSpace> space_O2,
                            int jobs = 1);

}  // namespace slipflow
