#include "slipflow/stokes.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

#include "slipflow/errors.hpp"

namespace slipflow {

namespace {

/// Local P2 data at one quadrature point of one element.
struct BasisAtPoint {
    double phi[6];
    Vec2 grad[6];
    Vec2 x;
};

BasisAtPoint basis_at(const ElementGeometry& eg, const QuadRule::Point& q) {
    BasisAtPoint b;
    p2_values(q.l1, q.l2, q.l3, b.phi);
    p2_gradients(q.l1, q.l2, q.l3, eg.grad_lambda, b.grad);
    b.x = eg.p[0] * q.l1 + eg.p[1] * q.l2 + eg.p[2] * q.l3;
    return b;
}

}  // namespace

Vec2 MixedField::velocity(int t, double l1, double l2, double l3) const {
    double phi[6];
    p2_values(l1, l2, l3, phi);
    const auto ent = space->element_p2(t);
    Vec2 u{0.0, 0.0};
    for (int i = 0; i < 6; ++i) {
        u.x += phi[i] * ux[ent[i]];
        u.y += phi[i] * uy[ent[i]];
    }
    return u;
}

Mat2 MixedField::velocity_jacobian(int t, double l1, double l2, double l3) const {
    const ElementGeometry eg = element_geometry(space->mesh(), t);
    Vec2 grad[6];
    p2_gradients(l1, l2, l3, eg.grad_lambda, grad);
    const auto ent = space->element_p2(t);
    Mat2 J;
    for (int i = 0; i < 6; ++i) {
        J(0, 0) += ux[ent[i]] * grad[i].x;
        J(0, 1) += ux[ent[i]] * grad[i].y;
        J(1, 0) += uy[ent[i]] * grad[i].x;
        J(1, 1) += uy[ent[i]] * grad[i].y;
    }
    return J;
}

double MixedField::pressure(int t, double l1, double l2, double l3) const {
    const auto& tv = space->mesh().tris[t];
    return l1 * p[tv[0]] + l2 * p[tv[1]] + l3 * p[tv[2]];
}

double MixedField::transformed_divergence(int t, double l1, double l2,
                                          double l3) const {
    const ElementGeometry eg = element_geometry(space->mesh(), t);
    const Vec2 x = eg.p[0] * l1 + eg.p[1] * l2 + eg.p[2] * l3;
    const Mat2 J = velocity_jacobian(t, l1, l2, l3);
    const double gp = metric.gprime(x.x);
    return J(0, 0) + J(1, 1) - gp * J(0, 1);
}

void MixedField::shift_pressure(double c) {
    for (auto& v : p) v += c;
}

struct StokesSolver::Impl {
    Eigen::SparseMatrix<double> A;
    Eigen::SparseMatrix<double> C;  ///< coupling to constrained dofs
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    std::vector<int> vel_dof;      ///< reduced entity -> system dof (-1 -> see slot)
    std::vector<int> pre_dof;      ///< reduced vertex dof
    std::vector<int> constrained_entities;  ///< P2 entities (master) with BC
    std::vector<int> constrained_slot;      ///< per master entity, -1 if free
    int n_u = 0, n_p = 0, n_sys = 0, n_con = 0;
    bool pin_pressure = false;
};

StokesSolver::~StokesSolver() = default;
StokesSolver::StokesSolver(StokesSolver&&) noexcept = default;
StokesSolver& StokesSolver::operator=(StokesSolver&&) noexcept = default;

int StokesSolver::num_unknowns() const { return impl_->n_sys; }
const Eigen::SparseMatrix<double>& StokesSolver::matrix() const {
    return impl_->A;
}

int StokesSolver::dof_of_velocity(int entity, int comp) const {
    const int r = space_->p2_reduced(entity);
    return 2 * r + comp;
}
int StokesSolver::dof_of_pressure(int vertex) const {
    return 2 * impl_->n_u + space_->p1_reduced(vertex);
}

StokesSolver::StokesSolver(std::shared_ptr<const FemSpace> space, Metric metric,
                           StokesBC bc, Gauge gauge)
    : space_(std::move(space)),
      metric_(std::move(metric)),
      bc_(std::move(bc)),
      gauge_(gauge),
      impl_(std::make_unique<Impl>()) {
    const FemSpace& S = *space_;
    const PeriodicMesh& mesh = S.mesh();
    auto& im = *impl_;
    im.n_u = S.num_p2_reduced();
    im.n_p = S.num_p1_reduced();
    im.n_sys = 2 * im.n_u + im.n_p + (gauge_ == Gauge::zero_mean ? 1 : 0);
    im.pin_pressure = (gauge_ == Gauge::pinned);

    // Constrained (Dirichlet) velocity entities, as master entities.
    im.constrained_slot.assign(S.num_p2_entities(), -1);
    for (const BTag tag : bc_.dirichlet_tags) {
        for (const int e : S.entities_on(tag)) {
            const int m = S.p2_master(e);
            if (im.constrained_slot[m] < 0) {
                im.constrained_slot[m] = 0;  // mark; slots numbered below
                im.constrained_entities.push_back(m);
            }
        }
    }
    std::sort(im.constrained_entities.begin(), im.constrained_entities.end());
    for (std::size_t i = 0; i < im.constrained_entities.size(); ++i)
        im.constrained_slot[im.constrained_entities[i]] = static_cast<int>(i);
    im.n_con = static_cast<int>(im.constrained_entities.size());

    auto vel_dof = [&](int master_entity, int comp) {
        return 2 * S.p2_reduced(master_entity) + comp;
    };
    auto pre_dof = [&](int vertex) {
        return 2 * im.n_u + S.p1_reduced(vertex);
    };
    auto is_con = [&](int master_entity) {
        return im.constrained_slot[master_entity] >= 0;
    };

    const QuadRule& rule = tri_quadrature(4);
    std::vector<Eigen::Triplet<double>> trips, ctrips;
    trips.reserve(static_cast<std::size_t>(mesh.num_tris()) * 160);

    std::vector<double> lumped(im.n_p, 0.0);

    for (int t = 0; t < mesh.num_tris(); ++t) {
        const ElementGeometry eg = element_geometry(mesh, t);
        const auto ent = S.element_p2(t);
        int master[6], slot[6];
        bool con[6];
        for (int i = 0; i < 6; ++i) {
            master[i] = S.p2_master(ent[i]);
            con[i] = is_con(master[i]);
            slot[i] = im.constrained_slot[master[i]];
        }
        const auto& tv = mesh.tris[t];

        double K[6][6] = {};
        double B[3][6][2] = {};  // pressure i, velocity j, component c

        for (const auto& q : rule.points) {
            const BasisAtPoint b = basis_at(eg, q);
            const JacobianSample js = metric_.at(b.x.x);
            const double w = q.w * eg.area;
            const double gp = js.gprime;
            Vec2 mg[6];
            for (int j = 0; j < 6; ++j) mg[j] = js.metric * b.grad[j];
            for (int i = 0; i < 6; ++i)
                for (int j = 0; j < 6; ++j)
                    K[i][j] += w * b.grad[i].dot(mg[j]);
            const double lam[3] = {q.l1, q.l2, q.l3};
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 6; ++j) {
                    // b(v, q) = -int q (d1 v1 + d2 v2 - g' d2 v1)
                    B[i][j][0] += -w * lam[i] * (b.grad[j].x - gp * b.grad[j].y);
                    B[i][j][1] += -w * lam[i] * b.grad[j].y;
                }
            }
        }

        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j) {
                if (K[i][j] == 0.0) continue;
                for (int c = 0; c < 2; ++c) {
                    if (con[i]) continue;
                    const int row = vel_dof(master[i], c);
                    if (con[j])
                        ctrips.emplace_back(row, 2 * slot[j] + c, K[i][j]);
                    else
                        trips.emplace_back(row, vel_dof(master[j], c), K[i][j]);
                }
            }
        }
        for (int i = 0; i < 3; ++i) {
            const int pm = S.p2_master(tv[i]);
            const int prow = pre_dof(pm);
            for (int j = 0; j < 6; ++j) {
                for (int c = 0; c < 2; ++c) {
                    const double v = B[i][j][c];
                    if (v == 0.0) continue;
                    if (con[j]) {
                        ctrips.emplace_back(prow, 2 * slot[j] + c, v);
                    } else {
                        const int vd = vel_dof(master[j], c);
                        trips.emplace_back(prow, vd, v);
                        trips.emplace_back(vd, prow, v);
                    }
                }
            }
            lumped[S.p1_reduced(pm)] += eg.area / 3.0;
        }
    }

    if (gauge_ == Gauge::zero_mean) {
        const int grow = im.n_sys - 1;
        for (int j = 0; j < im.n_p; ++j) {
            trips.emplace_back(grow, 2 * im.n_u + j, lumped[j]);
            trips.emplace_back(2 * im.n_u + j, grow, lumped[j]);
        }
    }
    if (im.pin_pressure) {
        // Remove row/col of pressure dof 0 and place a unit diagonal.
        std::vector<Eigen::Triplet<double>> kept;
        kept.reserve(trips.size());
        const int pd = 2 * im.n_u;
        for (const auto& tr : trips)
            if (tr.row() != pd && tr.col() != pd) kept.push_back(tr);
        kept.emplace_back(pd, pd, 1.0);
        trips.swap(kept);
    }
    for (const int m : im.constrained_entities)
        for (int c = 0; c < 2; ++c)
            trips.emplace_back(vel_dof(m, c), vel_dof(m, c), 1.0);

    im.A.resize(im.n_sys, im.n_sys);
    im.A.setFromTriplets(trips.begin(), trips.end());
    im.A.makeCompressed();
    im.C.resize(im.n_sys, 2 * im.n_con);
    im.C.setFromTriplets(ctrips.begin(), ctrips.end());
    im.C.makeCompressed();

    im.lu.analyzePattern(im.A);
    im.lu.factorize(im.A);
    if (im.lu.info() != Eigen::Success)
        throw SolverError(
            "transformed Stokes factorization failed: singular saddle system "
            "(all-natural velocity boundary or inf-sup zero pivot)");
}

MixedField StokesSolver::solve(const BodyForce& f, const InterfaceSource* src,
                               const BoundaryData* dirichlet_override) const {
    const FemSpace& S = *space_;
    const PeriodicMesh& mesh = S.mesh();
    const auto& im = *impl_;

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(im.n_sys);
    const QuadRule& rule = tri_quadrature(4);

    for (int t = 0; t < mesh.num_tris(); ++t) {
        const ElementGeometry eg = element_geometry(mesh, t);
        const auto ent = S.element_p2(t);
        for (const auto& q : rule.points) {
            const BasisAtPoint b = basis_at(eg, q);
            const Vec2 fv = f ? f(b.x) : Vec2{0.0, 0.0};
            if (fv.x == 0.0 && fv.y == 0.0) continue;
            const double w = q.w * eg.area;
            for (int i = 0; i < 6; ++i) {
                const int m = S.p2_master(ent[i]);
                if (im.constrained_slot[m] >= 0) continue;
                rhs[2 * S.p2_reduced(m) + 0] += w * fv.x * b.phi[i];
                rhs[2 * S.p2_reduced(m) + 1] += w * fv.y * b.phi[i];
            }
        }
    }

    if (src && src->traction) {
        for (const auto& te : mesh.tagged_edges) {
            if (te.tag != BTag::interface_s) continue;
            const Vec2 a = mesh.nodes[te.v0], b = mesh.nodes[te.v1];
            const double len = (b - a).norm();
            const int ents[3] = {te.v0, te.v1, S.edge_entity(te.v0, te.v1)};
            for (const auto& ep : edge_quadrature()) {
                const Vec2 x = a + (b - a) * ep.t;
                const Vec2 tv = src->traction(x.x);
                // P2 trace basis on the edge: ends (1-t)(1-2t), t(2t-1), mid 4t(1-t)
                const double phi[3] = {(1.0 - ep.t) * (1.0 - 2.0 * ep.t),
                                       ep.t * (2.0 * ep.t - 1.0),
                                       4.0 * ep.t * (1.0 - ep.t)};
                for (int i = 0; i < 3; ++i) {
                    const int m = S.p2_master(ents[i]);
                    if (im.constrained_slot[m] >= 0) continue;
                    rhs[2 * S.p2_reduced(m) + 0] += len * ep.w * tv.x * phi[i];
                    rhs[2 * S.p2_reduced(m) + 1] += len * ep.w * tv.y * phi[i];
                }
            }
        }
    }

    // Dirichlet data moved to the right-hand side.
    const BoundaryData& data = dirichlet_override ? *dirichlet_override : bc_.value;
    Eigen::VectorXd ud = Eigen::VectorXd::Zero(2 * im.n_con);
    if (data) {
        for (int s = 0; s < im.n_con; ++s) {
            const Vec2 pos = S.entity_pos(im.constrained_entities[s]);
            const Vec2 v = data(pos);
            ud[2 * s] = v.x;
            ud[2 * s + 1] = v.y;
        }
    }
    if (im.n_con > 0) rhs -= im.C * ud;
    for (int s = 0; s < im.n_con; ++s) {
        const int m = im.constrained_entities[s];
        rhs[2 * S.p2_reduced(m) + 0] = ud[2 * s];
        rhs[2 * S.p2_reduced(m) + 1] = ud[2 * s + 1];
    }

    Eigen::VectorXd x = im.lu.solve(rhs);
    if (im.lu.info() != Eigen::Success)
        throw SolverError("transformed Stokes solve failed");

    MixedField out;
    out.space = space_;
    out.metric = metric_;
    out.ux.resize(S.num_p2_entities());
    out.uy.resize(S.num_p2_entities());
    out.p.resize(S.num_vertices());
    for (int e = 0; e < S.num_p2_entities(); ++e) {
        const int r = S.p2_reduced(e);
        out.ux[e] = x[2 * r];
        out.uy[e] = x[2 * r + 1];
    }
    for (int v = 0; v < S.num_vertices(); ++v)
        out.p[v] = x[2 * im.n_u + S.p1_reduced(v)];

    const double bn = rhs.lpNorm<Eigen::Infinity>();
    out.solve_residual =
        (im.A * x - rhs).lpNorm<Eigen::Infinity>() / std::max(bn, 1.0);
    return out;
}

double integrate(const MixedField& f, const FieldIntegrand& fn, int quad_degree) {
    const auto& mesh = f.space->mesh();
    double acc = 0.0;
    const QuadRule& rule = tri_quadrature(quad_degree);
    for (int t = 0; t < mesh.num_tris(); ++t) {
        const ElementGeometry eg = element_geometry(mesh, t);
        const auto ent = f.space->element_p2(t);
        for (const auto& q : rule.points) {
            double phi[6];
            p2_values(q.l1, q.l2, q.l3, phi);
            Vec2 grad[6];
            p2_gradients(q.l1, q.l2, q.l3, eg.grad_lambda, grad);
            Vec2 u{0.0, 0.0};
            Mat2 J;
            for (int i = 0; i < 6; ++i) {
                u.x += phi[i] * f.ux[ent[i]];
                u.y += phi[i] * f.uy[ent[i]];
                J(0, 0) += f.ux[ent[i]] * grad[i].x;
                J(0, 1) += f.ux[ent[i]] * grad[i].y;
                J(1, 0) += f.uy[ent[i]] * grad[i].x;
                J(1, 1) += f.uy[ent[i]] * grad[i].y;
            }
            const Vec2 x = eg.p[0] * q.l1 + eg.p[1] * q.l2 + eg.p[2] * q.l3;
            const auto& tv = mesh.tris[t];
            const double pv =
                q.l1 * f.p[tv[0]] + q.l2 * f.p[tv[1]] + q.l3 * f.p[tv[2]];
            acc += q.w * eg.area * fn(x, u, J, pv);
        }
    }
    return acc;
}

namespace {
double integrate_subset(const MixedField& f, const std::vector<int>& tris,
                        const FieldIntegrand& fn, int quad_degree) {
    const auto& mesh = f.space->mesh();
    double acc = 0.0;
    const QuadRule& rule = tri_quadrature(quad_degree);
    for (int t : tris) {
        const ElementGeometry eg = element_geometry(mesh, t);
        const auto ent = f.space->element_p2(t);
        for (const auto& q : rule.points) {
            double phi[6];
            p2_values(q.l1, q.l2, q.l3, phi);
            Vec2 grad[6];
            p2_gradients(q.l1, q.l2, q.l3, eg.grad_lambda, grad);
            Vec2 u{0.0, 0.0};
            Mat2 J;
            for (int i = 0; i < 6; ++i) {
                u.x += phi[i] * f.ux[ent[i]];
                u.y += phi[i] * f.uy[ent[i]];
                J(0, 0) += f.ux[ent[i]] * grad[i].x;
                J(0, 1) += f.ux[ent[i]] * grad[i].y;
                J(1, 0) += f.uy[ent[i]] * grad[i].x;
                J(1, 1) += f.uy[ent[i]] * grad[i].y;
            }
            const Vec2 x = eg.p[0] * q.l1 + eg.p[1] * q.l2 + eg.p[2] * q.l3;
            const auto& tv = mesh.tris[t];
            const double pv =
                q.l1 * f.p[tv[0]] + q.l2 * f.p[tv[1]] + q.l3 * f.p[tv[2]];
            acc += q.w * eg.area * fn(x, u, J, pv);
        }
    }
    return acc;
}
}  // namespace

double integrate_band(const MixedField& f, int band_label, const FieldIntegrand& fn,
                      int quad_degree) {
    return integrate_subset(f, f.space->mesh().tris_in_layer(band_label), fn,
                            quad_degree);
}

double integrate_region(const MixedField& f, Region region,
                        const FieldIntegrand& fn, int quad_degree) {
    const auto& mesh = f.space->mesh();
    std::vector<int> tris;
    for (int t = 0; t < mesh.num_tris(); ++t)
        if (mesh.tri_region[t] == region) tris.push_back(t);
    return integrate_subset(f, tris, fn, quad_degree);
}

double integrate_edges(const MixedField& f, BTag tag, const EdgeIntegrand& fn) {
    const auto& mesh = f.space->mesh();
    double acc = 0.0;
    for (const auto& te : mesh.tagged_edges) {
        if (te.tag != tag) continue;
        auto at = f.space->edge_tris(te.v0, te.v1);
        int t = at[0];
        if (tag == BTag::interface_s && at[1] >= 0) {
            // take the trace from the above_s side
            if (mesh.tri_region[at[1]] == Region::above_s) t = at[1];
        }
        if (t < 0) throw GeometryError("integrate_edges: dangling tagged edge");
        const auto& tv = mesh.tris[t];
        int la = -1, lb = -1;
        for (int i = 0; i < 3; ++i) {
            if (tv[i] == te.v0) la = i;
            if (tv[i] == te.v1) lb = i;
        }
        if (la < 0 || lb < 0)
            throw GeometryError("integrate_edges: edge not in adjacent triangle");
        const Vec2 a = mesh.nodes[te.v0], b = mesh.nodes[te.v1];
        const double len = (b - a).norm();
        const Vec2 tangent = (b - a) / len;
        for (const auto& ep : edge_quadrature()) {
            double lam[3] = {0.0, 0.0, 0.0};
            lam[la] = 1.0 - ep.t;
            lam[lb] = ep.t;
            const Vec2 x = a + (b - a) * ep.t;
            const Vec2 u = f.velocity(t, lam[0], lam[1], lam[2]);
            const Mat2 J = f.velocity_jacobian(t, lam[0], lam[1], lam[2]);
            const double pv = f.pressure(t, lam[0], lam[1], lam[2]);
            acc += len * ep.w * fn(x, tangent, u, J, pv);
        }
    }
    return acc;
}

double norm_l2_velocity(const MixedField& f) {
    return std::sqrt(integrate(
        f, [](Vec2, Vec2 u, const Mat2&, double) { return u.squared_norm(); }));
}

double norm_h1semi_velocity(const MixedField& f) {
    return std::sqrt(integrate(f, [](Vec2, Vec2, const Mat2& J, double) {
        return J.frobenius_sq();
    }));
}

double norm_l2_pressure(const MixedField& f) {
    return std::sqrt(integrate(
        f, [](Vec2, Vec2, const Mat2&, double p) { return p * p; }));
}

double mean_pressure(const MixedField& f) {
    const double a = domain_area(*f.space);
    return integrate(f, [](Vec2, Vec2, const Mat2&, double p) { return p; }) / a;
}

double domain_area(const FemSpace& space) { return space.mesh().total_area(); }

FieldEvaluator::FieldEvaluator(const MixedField& f)
    : f_(&f), locator_(f.space->mesh()) {}

Vec2 FieldEvaluator::velocity(Vec2 x) const {
    int t;
    double l1, l2, l3;
    if (!locator_.locate(x, t, l1, l2, l3))
        throw NumericalError("field evaluation outside mesh");
    return f_->velocity(t, l1, l2, l3);
}

Mat2 FieldEvaluator::velocity_jacobian(Vec2 x) const {
    int t;
    double l1, l2, l3;
    if (!locator_.locate(x, t, l1, l2, l3))
        throw NumericalError("field evaluation outside mesh");
    return f_->velocity_jacobian(t, l1, l2, l3);
}

double FieldEvaluator::pressure(Vec2 x) const {
    int t;
    double l1, l2, l3;
    if (!locator_.locate(x, t, l1, l2, l3))
        throw NumericalError("field evaluation outside mesh");
    return f_->pressure(t, l1, l2, l3);
}

}  // namespace slipflow
