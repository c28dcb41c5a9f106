#include "slipflow/effective.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>

#include "slipflow/errors.hpp"

namespace slipflow {

namespace {

std::vector<double> comp(const std::vector<Vec2>& v, bool second) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = second ? v[i].y : v[i].x;
    return out;
}

std::vector<double> entry(const std::vector<Mat2>& m, int r, int c) {
    std::vector<double> out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) out[i] = m[i](r, c);
    return out;
}

}  // namespace

EffectiveCoefficients::EffectiveCoefficients(double L, std::vector<double> x1,
                                             std::vector<Vec2> cbl,
                                             std::vector<double> cbl_omega,
                                             std::vector<Mat2> A)
    : grid_(std::move(x1)),
      cbl_samples_(cbl),
      cbl1_(L, comp(cbl, false)),
      cbl2_(L, comp(cbl, true)),
      cblo_(L, std::move(cbl_omega)),
      a11_(L, entry(A, 0, 0)),
      a12_(L, entry(A, 0, 1)),
      a21_(L, entry(A, 1, 0)),
      a22_(L, entry(A, 1, 1)) {}

double EffectiveCoefficients::compatibility_integral(const CurveSpec& spec) const {
    // Composite Simpson over a fine grid of one period.
    const double L = period();
    const int n = 512;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double x = L * i / n;
        const double gp = spec.dg(x);
        const Vec2 c = cbl(x);
        const double f = -gp * c.x + c.y;  // Cbl . F^{-T} e2
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * f;
    }
    return acc * L / (3.0 * n);
}

double ScalarField::value(int t, double l1, double l2, double l3) const {
    double phi[6];
    p2_values(l1, l2, l3, phi);
    const auto ent = space->element_p2(t);
    double s = 0.0;
    for (int i = 0; i < 6; ++i) s += phi[i] * v[ent[i]];
    return s;
}

Vec2 ScalarField::gradient(int t, double l1, double l2, double l3) const {
    const ElementGeometry eg = element_geometry(space->mesh(), t);
    Vec2 grad[6];
    p2_gradients(l1, l2, l3, eg.grad_lambda, grad);
    const auto ent = space->element_p2(t);
    Vec2 g{0.0, 0.0};
    for (int i = 0; i < 6; ++i) g += grad[i] * v[ent[i]];
    return g;
}

MixedField solve_u0(const CurveSpec& spec, const BodyForce& f,
                    std::shared_ptr<const FemSpace> space_O1) {
    StokesBC bc;
    bc.dirichlet_tags = {BTag::interface_s, BTag::top};
    StokesSolver solver(std::move(space_O1), Metric::from_curve(spec), bc,
                        Gauge::zero_mean);
    return solver.solve(f);
}

std::vector<Vec2> stress_jump(const MixedField& u0, const CurveSpec& spec,
                              const std::vector<double>& x1_grid) {
    const auto& mesh = u0.space->mesh();
    const double L = mesh.xmax - mesh.xmin;

    // Patch radius from the interface discretization length.
    double h = 0.0;
    for (const auto& te : mesh.tagged_edges)
        if (te.tag == BTag::interface_s)
            h = std::max(h, (mesh.nodes[te.v1] - mesh.nodes[te.v0]).norm());
    if (h == 0.0) throw GeometryError("stress_jump: mesh has no interface edges");
    const double radius = 2.5 * h;

    // Jacobian samples near the interface: quadrature points of the first
    // element layers, gathered once.
    struct Sample {
        Vec2 x;
        Mat2 J;
    };
    std::vector<Sample> samples;
    const QuadRule& rule = tri_quadrature(2);
    for (int t = 0; t < mesh.num_tris(); ++t) {
        const auto& tv = mesh.tris[t];
        const double yc =
            (mesh.nodes[tv[0]].y + mesh.nodes[tv[1]].y + mesh.nodes[tv[2]].y) / 3.0;
        if (yc > radius) continue;
        const ElementGeometry eg = element_geometry(mesh, t);
        for (const auto& q : rule.points) {
            Sample s;
            s.x = eg.p[0] * q.l1 + eg.p[1] * q.l2 + eg.p[2] * q.l3;
            s.J = u0.velocity_jacobian(t, q.l1, q.l2, q.l3);
            samples.push_back(s);
        }
    }

    std::vector<Vec2> out;
    out.reserve(x1_grid.size());
    for (const double s : x1_grid) {
        // Least squares linear fit J_ab(x, y) ~ c0 + c1 (x - s) + c2 y over
        // the patch (periodic distance in x).
        double M[3][3] = {};
        double rhs[4][3] = {};
        int used = 0;
        for (const auto& sm : samples) {
            double dx = std::remainder(sm.x.x - s, L);
            const double dy = sm.x.y;
            if (dx * dx + dy * dy > radius * radius) continue;
            ++used;
            const double b[3] = {1.0, dx, dy};
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) M[i][j] += b[i] * b[j];
            const double val[4] = {sm.J(0, 0), sm.J(0, 1), sm.J(1, 0),
                                   sm.J(1, 1)};
            for (int c = 0; c < 4; ++c)
                for (int i = 0; i < 3; ++i) rhs[c][i] += b[i] * val[c];
        }
        if (used < 6)
            throw GeometryError("stress_jump: recovery patch has too few samples");
        // Solve the 3x3 normal equations by Cramer's rule.
        auto det3 = [](const double a[3][3]) {
            return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                   a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                   a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
        };
        const double d0 = det3(M);
        Mat2 J;
        for (int c = 0; c < 4; ++c) {
            double A0[3][3];
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) A0[i][j] = M[i][j];
            for (int i = 0; i < 3; ++i) A0[i][0] = rhs[c][i];
            J(c / 2, c % 2) = det3(A0) / d0;
        }
        const JacobianSample js = jacobian(spec, s);
        const Vec2 me2 = js.metric * Vec2{0.0, 1.0};
        out.push_back(J * me2);
    }
    return out;
}

MixedField solve_effective_fluid(const CurveSpec& spec, const BodyForce& f,
                                 const EffectiveCoefficients& coeffs, double eps,
                                 std::shared_ptr<const FemSpace> space_O1) {
    double scale = 0.0;
    for (const Vec2& c : coeffs.cbl_samples()) scale += c.norm();
    scale = std::max(scale / std::max<std::size_t>(coeffs.cbl_samples().size(), 1),
                     1e-300);
    const double compat = coeffs.compatibility_integral(spec);
    if (std::abs(compat) > 1e-6 * std::max(scale, 1e-12))
        throw NumericalError(
            "effective slip data violates the interface compatibility integral");

    StokesBC bc;
    bc.dirichlet_tags = {BTag::interface_s, BTag::top};
    const double ymid = 0.5 * (space_O1->mesh().ymin + space_O1->mesh().ymax);
    bc.value = [&coeffs, eps, ymid](Vec2 x) -> Vec2 {
        if (x.y > ymid) return {0.0, 0.0};  // top wall
        const Vec2 c = coeffs.cbl(x.x);
        return {-eps * c.x, -eps * c.y};
    };
    StokesSolver solver(std::move(space_O1), Metric::from_curve(spec), bc,
                        Gauge::zero_mean);
    return solver.solve(f);
}

ScalarField solve_darcy(const CurveSpec& spec, const BodyForce& f,
                        const EffectiveCoefficients& coeffs,
                        const std::function<double(double)>& sigma_trace,
                        std::shared_ptr<const FemSpace> space_O2) {
    const FemSpace& S = *space_O2;
    const PeriodicMesh& mesh = S.mesh();

    // Dirichlet entities on the interface (the top boundary of Omega_2).
    std::vector<char> con(S.num_p2_entities(), 0);
    for (const int e : S.entities_on(BTag::interface_s)) con[S.p2_master(e)] = 1;

    const int n = S.num_p2_reduced();
    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd ud = Eigen::VectorXd::Zero(n);
    for (int e = 0; e < S.num_p2_entities(); ++e) {
        const int m = S.p2_master(e);
        if (con[m]) ud[S.p2_reduced(m)] = sigma_trace(S.entity_pos(m).x);
    }

    const QuadRule& rule = tri_quadrature(4);
    for (int t = 0; t < mesh.num_tris(); ++t) {
        const ElementGeometry eg = element_geometry(mesh, t);
        const auto ent = S.element_p2(t);
        int master[6], red[6];
        bool c6[6];
        for (int i = 0; i < 6; ++i) {
            master[i] = S.p2_master(ent[i]);
            red[i] = S.p2_reduced(master[i]);
            c6[i] = con[master[i]] != 0;
        }
        double K[6][6] = {};
        double F[6] = {};
        for (const auto& q : rule.points) {
            Vec2 grad[6];
            p2_gradients(q.l1, q.l2, q.l3, eg.grad_lambda, grad);
            const Vec2 x = eg.p[0] * q.l1 + eg.p[1] * q.l2 + eg.p[2] * q.l3;
            const JacobianSample js = jacobian(spec, x.x);
            const Mat2 A = coeffs.permeability(x.x);
            // interpolated permeability must stay positive definite
            const double tr = A.trace(), det = A.det();
            if (!(tr > 0.0) || !(det > 0.0))
                throw NumericalError(
                    "darcy: interpolated permeability lost positive definiteness");
            const double w = q.w * eg.area;
            const Vec2 fv = f ? f(x) : Vec2{0.0, 0.0};
            const Vec2 Af = A * fv;
            Vec2 ftg[6];
            for (int i = 0; i < 6; ++i) ftg[i] = js.F_invT * grad[i];
            for (int i = 0; i < 6; ++i) {
                for (int j = 0; j < 6; ++j)
                    K[i][j] += w * ftg[i].dot(A * ftg[j]);
                F[i] += w * Af.dot(ftg[i]);
            }
        }
        for (int i = 0; i < 6; ++i) {
            if (c6[i]) continue;
            rhs[red[i]] += F[i];
            for (int j = 0; j < 6; ++j) {
                if (c6[j])
                    rhs[red[i]] -= K[i][j] * ud[red[j]];
                else
                    trips.emplace_back(red[i], red[j], K[i][j]);
            }
        }
    }
    for (int m = 0; m < S.num_p2_entities(); ++m)
        if (con[m] && S.p2_master(m) == m) {
            trips.emplace_back(S.p2_reduced(m), S.p2_reduced(m), 1.0);
            rhs[S.p2_reduced(m)] = ud[S.p2_reduced(m)];
        }

    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trips.begin(), trips.end());
    A.makeCompressed();
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
    if (ldlt.info() != Eigen::Success)
        throw SolverError("darcy: factorization failed");
    Eigen::VectorXd x = ldlt.solve(rhs);

    ScalarField out;
    out.space = std::move(space_O2);
    out.v.resize(S.num_p2_entities());
    for (int e = 0; e < S.num_p2_entities(); ++e)
        out.v[e] = x[S.p2_reduced(e)];
    return out;
}

Vec2 darcy_flux(const ScalarField& p, const CurveSpec& spec, const BodyForce& f,
                const EffectiveCoefficients& coeffs, int t, double l1, double l2,
                double l3) {
    const ElementGeometry eg = element_geometry(p.space->mesh(), t);
    const Vec2 x = eg.p[0] * l1 + eg.p[1] * l2 + eg.p[2] * l3;
    const JacobianSample js = jacobian(spec, x.x);
    const Vec2 g = p.gradient(t, l1, l2, l3);
    const Vec2 fv = f ? f(x) : Vec2{0.0, 0.0};
    return coeffs.permeability(x.x) * (fv - js.F_invT * g);
}

std::pair<SlipProfile, double> slip_and_massflow(const MixedField& ueff,
                                                 const CurveSpec& spec) {
    SlipProfile profile;
    const auto& mesh = ueff.space->mesh();
    std::vector<std::pair<double, double>> pts;
    integrate_edges(ueff, BTag::interface_s,
                    [&](Vec2 x, Vec2, Vec2 u, const Mat2&, double) {
                        const double gp = spec.dg(x.x);
                        pts.emplace_back(x.x, u.x + gp * u.y);
                        return 0.0;
                    });
    std::sort(pts.begin(), pts.end());
    for (const auto& [x, s] : pts) {
        profile.x1.push_back(x);
        profile.slip.push_back(s);
    }
    (void)mesh;
    const double M = integrate(ueff, [&spec](Vec2 x, Vec2 u, const Mat2&, double) {
        return u.x + spec.dg(x.x) * u.y;
    });
    return {std::move(profile), M};
}

EffectiveSolution solve_effective(const CurveSpec& spec, const BodyForce& f,
                                  const EffectiveCoefficients& coeffs, double eps,
                                  std::shared_ptr<const FemSpace> space_O1,
                                  std::shared_ptr<const FemSpace> space_O2) {
    EffectiveSolution out;
    out.eps = eps;
    out.ueff = solve_effective_fluid(spec, f, coeffs, eps, space_O1);
    auto eval = std::make_shared<FieldEvaluator>(out.ueff);
    auto trace = [eval, &coeffs](double x1) {
        return eval->pressure({x1, 0.0}) + coeffs.cbl_omega(x1);
    };
    out.darcy = solve_darcy(spec, f, coeffs, trace, std::move(space_O2));
    out.M_eff = slip_and_massflow(out.ueff, spec).second;
    return out;
}

}  // namespace slipflow
