#include "slipflow/cell.hpp"

#include <cmath>

#include "slipflow/errors.hpp"
#include "slipflow/meshgen.hpp"

namespace slipflow {

namespace {

Mat2 permeability_matrix(const MixedField& w1, const MixedField& w2) {
    Mat2 A;
    const auto avg = [](const MixedField& f) {
        Vec2 s{0.0, 0.0};
        s.x = integrate(f, [](Vec2, Vec2 u, const Mat2&, double) { return u.x; });
        s.y = integrate(f, [](Vec2, Vec2 u, const Mat2&, double) { return u.y; });
        return s;
    };
    const Vec2 a1 = avg(w1), a2 = avg(w2);
    // A_ji = int w^j_i : row j holds the averages of w^j.
    A(0, 0) = a1.x;
    A(0, 1) = a1.y;
    A(1, 0) = a2.x;
    A(1, 1) = a2.y;
    return A;
}

void quality_gate(const Mat2& A) {
    const double scale = A.frobenius();
    if (!(scale > 0.0))
        throw NumericalError("permeability: zero matrix (degenerate cell solve)");
    if (std::abs(A(0, 1) - A(1, 0)) > 1e-8 * scale)
        throw NumericalError(
            "permeability: symmetry defect beyond 1e-8; refine the cell mesh");
    const double tr = A.trace();
    const double det = A.det();
    const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
    const double lo = 0.5 * tr - disc;
    if (!(lo > 0.0))
        throw NumericalError(
            "permeability: matrix not positive definite; refine the cell mesh");
}

}  // namespace

CellWorkspace::CellWorkspace(const InclusionSpec& inclusion, double h) {
    auto mesh = std::make_shared<PeriodicMesh>(build_cell_mesh(inclusion, h));
    space_ = std::make_shared<FemSpace>(mesh);
}

PermeabilitySample CellWorkspace::at_slope(double gprime) const {
    for (const auto& [gp, sample] : cache_)
        if (gp == gprime) return sample;

    StokesBC bc;
    bc.dirichlet_tags = {BTag::pore};
    StokesSolver solver(space_, Metric::frozen(gprime), bc, Gauge::zero_mean);
    PermeabilitySample s;
    s.gprime = gprime;
    s.w1 = solver.solve([](Vec2) { return Vec2{1.0, 0.0}; });
    s.w2 = solver.solve([](Vec2) { return Vec2{0.0, 1.0}; });
    s.A = permeability_matrix(s.w1, s.w2);
    quality_gate(s.A);
    const double tr = s.A.trace();
    const double disc =
        std::sqrt(std::max(0.0, 0.25 * tr * tr - s.A.det()));
    s.eig_lo = 0.5 * tr - disc;
    s.eig_hi = 0.5 * tr + disc;
    cache_.emplace_back(gprime, s);
    return s;
}

MixedField solve_cell(const CurveSpec& spec, double x1, int j,
                      const InclusionSpec& inclusion, double h) {
    if (j != 1 && j != 2) throw ConfigError("solve_cell: j must be 1 or 2");
    CellWorkspace ws(inclusion, h);
    const PermeabilitySample s = ws.at_slope(spec.dg(x1));
    return j == 1 ? s.w1 : s.w2;
}

std::vector<PermeabilitySample> permeability(const CurveSpec& spec,
                                             const std::vector<double>& x1_grid,
                                             const InclusionSpec& inclusion,
                                             double h) {
    if (x1_grid.empty()) throw ConfigError("permeability: empty x1 grid");
    CellWorkspace ws(inclusion, h);
    std::vector<PermeabilitySample> out;
    out.reserve(x1_grid.size());
    for (const double x1 : x1_grid) {
        PermeabilitySample s = ws.at_slope(spec.dg(x1));
        s.x1 = x1;
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace slipflow
