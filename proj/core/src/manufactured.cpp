#include "slipflow/manufactured.hpp"

#include <cmath>
#include <numbers>

#include "slipflow/errors.hpp"
#include "slipflow/fit.hpp"
#include "slipflow/meshgen.hpp"

namespace slipflow {

namespace {

constexpr double kPi = std::numbers::pi;

/// psi(z) = A sin(w z1 + a) sin(b z2 + c); derivative (m1, m2) shifts phases.
struct Stream {
    double A, w, a, b, c;
    double d(Vec2 z, int m1, int m2) const {
        double amp = A;
        for (int i = 0; i < m1; ++i) amp *= w;
        for (int i = 0; i < m2; ++i) amp *= b;
        return amp * std::sin(w * z.x + a + 0.5 * kPi * m1) *
               std::sin(b * z.y + c + 0.5 * kPi * m2);
    }
};

struct Press {
    double A, w, a, b, c;
    double d(Vec2 z, int m1, int m2) const {
        double amp = A;
        for (int i = 0; i < m1; ++i) amp *= w;
        for (int i = 0; i < m2; ++i) amp *= b;
        return amp * std::cos(w * z.x + a + 0.5 * kPi * m1) *
               std::sin(b * z.y + c + 0.5 * kPi * m2);
    }
};

Stream stream_for(const CurveSpec& spec) {
    return {0.35, 2.0 * kPi / spec.period(), 0.4, 1.7, 0.3};
}

Press press_for(const CurveSpec& spec) {
    return {0.8, 2.0 * kPi / spec.period(), -0.2, 2.1, 0.6};
}

}  // namespace

Vec2 ManufacturedSolution::velocity(Vec2 z) const {
    const Stream s = stream_for(spec);
    const double gp = spec.dg(z.x);
    // u = transformed curl of psi: (-psi_2, psi_1 - g' psi_2)
    return {-s.d(z, 0, 1), s.d(z, 1, 0) - gp * s.d(z, 0, 1)};
}

Mat2 ManufacturedSolution::velocity_jacobian(Vec2 z) const {
    const Stream s = stream_for(spec);
    const double gp = spec.dg(z.x), gpp = spec.ddg(z.x);
    Mat2 J;
    J(0, 0) = -s.d(z, 1, 1);
    J(0, 1) = -s.d(z, 0, 2);
    J(1, 0) = s.d(z, 2, 0) - gpp * s.d(z, 0, 1) - gp * s.d(z, 1, 1);
    J(1, 1) = s.d(z, 1, 1) - gp * s.d(z, 0, 2);
    return J;
}

double ManufacturedSolution::pressure(Vec2 z) const {
    return press_for(spec).d(z, 0, 0);
}

Vec2 ManufacturedSolution::force(Vec2 z) const {
    const Stream s = stream_for(spec);
    const Press pr = press_for(spec);
    const double gp = spec.dg(z.x), gpp = spec.ddg(z.x), gppp = spec.dddg(z.x);

    // Second derivatives of u1 = -psi_2 and u2 = psi_1 - g' psi_2.
    const double u1_01 = -s.d(z, 0, 2);
    const double u1_20 = -s.d(z, 2, 1);
    const double u1_11 = -s.d(z, 1, 2);
    const double u1_02 = -s.d(z, 0, 3);
    const double u2_01 = s.d(z, 1, 1) - gp * s.d(z, 0, 2);
    const double u2_20 = s.d(z, 3, 0) - gppp * s.d(z, 0, 1) -
                         2.0 * gpp * s.d(z, 1, 1) - gp * s.d(z, 2, 1);
    const double u2_11 = s.d(z, 2, 1) - gpp * s.d(z, 0, 2) - gp * s.d(z, 1, 2);
    const double u2_02 = s.d(z, 1, 2) - gp * s.d(z, 0, 3);

    auto tlap = [&](double c20, double c11, double c02, double c01) {
        return c20 - 2.0 * gp * c11 + (1.0 + gp * gp) * c02 - gpp * c01;
    };
    const double p10 = pr.d(z, 1, 0), p01 = pr.d(z, 0, 1);
    return {-tlap(u1_20, u1_11, u1_02, u1_01) + (p10 - gp * p01),
            -tlap(u2_20, u2_11, u2_02, u2_01) + p01};
}

ManufacturedSolution make_manufactured(const CurveSpec& spec) { return {spec}; }

RateTable manufactured_convergence(const CurveSpec& spec, int levels) {
    if (levels < 1) throw ConfigError("manufactured_convergence: levels >= 1");
    const ManufacturedSolution ms = make_manufactured(spec);
    RateTable table;
    for (int l = 0; l < levels; ++l) {
        const double h = 1.0 / (8 << l);
        auto mesh = std::make_shared<PeriodicMesh>(build_rect_mesh(
            spec.period(), 0.0, 1.0, h, BTag::bottom, BTag::top));
        auto space = std::make_shared<FemSpace>(mesh);
        StokesBC bc;
        bc.dirichlet_tags = {BTag::bottom, BTag::top};
        bc.value = [&ms](Vec2 x) { return ms.velocity(x); };
        StokesSolver solver(space, Metric::from_curve(spec), bc, Gauge::zero_mean);
        MixedField sol = solver.solve([&ms](Vec2 x) { return ms.force(x); });

        // The exact pressure is compared after aligning means, both computed
        // with the same quadrature.
        const double area = domain_area(*space);
        const double mean_h = mean_pressure(sol);
        const double mean_ex =
            integrate(sol, [&](Vec2 x, Vec2, const Mat2&, double) {
                return ms.pressure(x);
            }) / area;

        const double eu = std::sqrt(integrate(
            sol, [&](Vec2 x, Vec2 u, const Mat2&, double) {
                return (u - ms.velocity(x)).squared_norm();
            }));
        const double ep = std::sqrt(integrate(
            sol, [&](Vec2 x, Vec2, const Mat2&, double p) {
                const double d = (p - mean_h) - (ms.pressure(x) - mean_ex);
                return d * d;
            }));
        table.h.push_back(h);
        table.err_u_l2.push_back(eu);
        table.err_p_l2.push_back(ep);
    }
    if (levels >= 2) {
        const LineFit fu = fit_loglog(table.h, table.err_u_l2);
        const LineFit fp = fit_loglog(table.h, table.err_p_l2);
        table.rate_u = fu.slope;
        table.rate_p = fp.slope;
        table.r2_u = fu.r2;
        table.r2_p = fp.r2;
    }
    return table;
}

}  // namespace slipflow
