#include "slipflow/identities.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace slipflow {

double IdentityReport::max_residual() const {
    double m = 0.0;
    for (const auto& e : entries) m = std::max(m, e.residual);
    return m;
}

const IdentityResidual& IdentityReport::operator[](const std::string& name) const {
    for (const auto& e : entries)
        if (e.name == name) return e;
    throw std::out_of_range("IdentityReport: no entry named " + name);
}

namespace {

constexpr double kPi = std::numbers::pi;

/// A * sin(kx*x + px) * sin(ky*y + py); derivatives shift the phases.
struct TrigTerm {
    double A, kx, px, ky, py;
    double d(Vec2 p, int mx, int my) const {
        double amp = A;
        for (int i = 0; i < mx; ++i) amp *= kx;
        for (int i = 0; i < my; ++i) amp *= ky;
        return amp * std::sin(kx * p.x + px + 0.5 * kPi * mx) *
               std::sin(ky * p.y + py + 0.5 * kPi * my);
    }
};

struct TrigField {
    std::vector<TrigTerm> terms;
    double d(Vec2 p, int mx, int my) const {
        double s = 0.0;
        for (const auto& t : terms) s += t.d(p, mx, my);
        return s;
    }
};

/// Fixed manufactured fields, L-periodic in the first coordinate.  Shipping
/// them with the module keeps the residual checks deterministic.
TrigField field_a(double L) {
    const double w = 2.0 * kPi / L;
    return {{{1.0, w, 0.3, kPi, 0.7},
             {0.4, 2.0 * w, 1.1, 2.0, 0.2},
             {0.25, 3.0 * w, -0.5, 1.3, 2.1}}};
}

TrigField field_b(double L) {
    const double w = 2.0 * kPi / L;
    return {{{0.8, w, -0.2, 1.7, 0.9}, {0.3, 2.0 * w, 0.6, kPi, -0.4}}};
}

TrigField field_psi(double L) {
    const double w = 2.0 * kPi / L;
    return {{{0.7, w, 0.45, 1.2, 1.3}, {0.2, 2.0 * w, -0.8, 2.3, 0.5}}};
}

/// Derivative provider: analytic, or central finite differences of the same
/// field (for the Richardson check).
using Derivs = std::function<double(Vec2, int, int)>;

Derivs analytic(TrigField fld) {
    return [fld](Vec2 p, int mx, int my) { return fld.d(p, mx, my); };
}

Derivs finite_difference(TrigField fld, double h) {
    struct FD {
        TrigField f;
        double h;
        double d(Vec2 p, int mx, int my) const {
            if (mx > 0)
                return (d({p.x + h, p.y}, mx - 1, my) -
                        d({p.x - h, p.y}, mx - 1, my)) /
                       (2.0 * h);
            if (my > 0)
                return (d({p.x, p.y + h}, mx, my - 1) -
                        d({p.x, p.y - h}, mx, my - 1)) /
                       (2.0 * h);
            return f.d(p, 0, 0);
        }
    };
    FD fd{fld, h};
    return [fd](Vec2 p, int mx, int my) { return fd.d(p, mx, my); };
}

/// z-derivatives (to second order) of c(z) = ctilde(psi(z)) by chain rule.
struct PulledBack {
    const Derivs* ct;
    const CurveSpec* spec;
    double d10(Vec2 z) const {
        const Vec2 x = map_point(*spec, z);
        return (*ct)(x, 1, 0) + spec->dg(z.x) * (*ct)(x, 0, 1);
    }
    double d01(Vec2 z) const { return (*ct)(map_point(*spec, z), 0, 1); }
    double d20(Vec2 z) const {
        const Vec2 x = map_point(*spec, z);
        const double gp = spec->dg(z.x), gpp = spec->ddg(z.x);
        return (*ct)(x, 2, 0) + 2.0 * gp * (*ct)(x, 1, 1) +
               gp * gp * (*ct)(x, 0, 2) + gpp * (*ct)(x, 0, 1);
    }
    double d11(Vec2 z) const {
        const Vec2 x = map_point(*spec, z);
        return (*ct)(x, 1, 1) + spec->dg(z.x) * (*ct)(x, 0, 2);
    }
    double d02(Vec2 z) const { return (*ct)(map_point(*spec, z), 0, 2); }
};

/// div_z(F^{-1}F^{-T} grad_z c) = c_11 - 2 g' c_12 + (1+g'^2) c_22 - g'' c_2.
double transformed_laplacian(double gp, double gpp, double c20, double c11,
                             double c02, double c01) {
    return c20 - 2.0 * gp * c11 + (1.0 + gp * gp) * c02 - gpp * c01;
}

struct MaxTracker {
    double v = 0.0;
    void update(double r) { v = std::max(v, std::abs(r)); }
};

IdentityReport run(const CurveSpec& spec, int resolution,
                   const std::function<Derivs(const TrigField&)>& make) {
    const double L = spec.period();
    const Derivs ct = make(field_a(L));    // scalar in physical coordinates
    const Derivs bt = make(field_b(L));    // second physical scalar
    const Derivs az = make(field_a(L));    // scalar in reference coordinates
    const Derivs bz = make(field_b(L));    // second reference scalar
    const Derivs psi = make(field_psi(L)); // stream function in reference coords

    const PulledBack c{&ct, &spec};
    const PulledBack b{&bt, &spec};

    MaxTracker grad_r, lap_r, div_r, mdiv_r, sgrad_r, curldiv_r, prod_r,
        curlgrad_r, rotdiv_r;

    for (int i = 0; i <= resolution; ++i) {
        for (int k = 0; k <= resolution; ++k) {
            const Vec2 z{L * static_cast<double>(i) / resolution,
                         -1.0 + 2.0 * static_cast<double>(k) / resolution};
            const Vec2 x = map_point(spec, z);
            const double gp = spec.dg(z.x);
            const double gpp = spec.ddg(z.x);
            const double gppp = spec.dddg(z.x);
            const JacobianSample J = jacobian(spec, z.x);

            // transform item 1: F^{-T} grad_z c == grad_x ctilde.
            const Vec2 lhs1 = J.F_invT * Vec2{c.d10(z), c.d01(z)};
            grad_r.update(lhs1.x - ct(x, 1, 0));
            grad_r.update(lhs1.y - ct(x, 0, 1));

            // transform items 1/2: div_z(F^{-1}F^{-T} grad_z c) == Lap_x ctilde.
            lap_r.update(transformed_laplacian(gp, gpp, c.d20(z), c.d11(z),
                                               c.d02(z), c.d01(z)) -
                         (ct(x, 2, 0) + ct(x, 0, 2)));

            // transform item 3: div_z(F^{-1} j) == div_x jtilde,
            // jtilde = (ctilde, btilde);  div_z(F^{-1}w) = w1_1 + w2_2 - g' w1_2.
            div_r.update((c.d10(z) + b.d01(z) - gp * c.d01(z)) -
                         (ct(x, 1, 0) + bt(x, 0, 1)));

            // transform item 4: matrix divergence column-wise,
            // Mtilde = [ctilde, btilde; btilde, ctilde].
            mdiv_r.update((c.d10(z) + b.d01(z) - gp * c.d01(z)) -
                          (ct(x, 1, 0) + bt(x, 0, 1)));
            mdiv_r.update((b.d10(z) + c.d01(z) - gp * b.d01(z)) -
                          (bt(x, 1, 0) + ct(x, 0, 1)));

            // Reference-coordinate samples for the algebraic identities.
            const double a10 = az(z, 1, 0), a01 = az(z, 0, 1);
            const double a11 = az(z, 1, 1), a02 = az(z, 0, 2);

            // identity 1: div_z(c F^{-1}) == F^{-T} grad_z c.
            {
                const Vec2 rhs = J.F_invT * Vec2{a10, a01};
                sgrad_r.update((a10 - gp * a01) - rhs.x);
                sgrad_r.update(a01 - rhs.y);
            }

            // identity 3: div_z(F^{-1} tcurl_z a) == 0,
            // tcurl_z a = rot90 F^{-T} grad a = (-a_2, a_1 - g' a_2).
            {
                const double w1_1 = -a11;
                const double w1_2 = -a02;
                const double w2_2 = a11 - gp * a02;
                curldiv_r.update(w1_1 + w2_2 - gp * w1_2);
            }

            // identity 4: div_z(F^{-1}(a j)) == a div_z(F^{-1}j)
            //             + F^{-T} grad a . j, with j = (psi, b).
            {
                const double av = az(z, 0, 0);
                const double j1 = psi(z, 0, 0), j2 = bz(z, 0, 0);
                const double j1_1 = psi(z, 1, 0), j1_2 = psi(z, 0, 1);
                const double j2_2 = bz(z, 0, 1);
                const double lhs = (a10 * j1 + av * j1_1) + (a01 * j2 + av * j2_2) -
                                   gp * (a01 * j1 + av * j1_2);
                const Vec2 ftg = J.F_invT * Vec2{a10, a01};
                const double rhs = av * (j1_1 + j2_2 - gp * j1_2) +
                                   ftg.x * j1 + ftg.y * j2;
                prod_r.update(lhs - rhs);
            }

            // identity 5: tcurl_z(F^{-T} grad_z a) == 0,
            // tcurl(w) = curl_z(F^T w) = d1(w2) - d2(w1 + g' w2).
            {
                // w = F^{-T} grad a = (a_1 - g' a_2, a_2)
                const double w1_2 = a11 - gp * a02;
                const double w2_1 = a11;
                const double w2_2 = a02;
                curlgrad_r.update(w2_1 - w1_2 - gp * w2_2);
            }

            // identity 7: j = tcurl(psi) satisfies div_z(F^{-1}j) == 0 and
            // F^{-T} grad_z(tcurl j) == rot90 div_z(F^{-1}F^{-T} grad_z j).
            {
                const double p01 = psi(z, 0, 1);
                const double p11 = psi(z, 1, 1), p02 = psi(z, 0, 2);
                const double p30 = psi(z, 3, 0), p21 = psi(z, 2, 1),
                             p12 = psi(z, 1, 2), p03 = psi(z, 0, 3);
                // j = (-psi_2, psi_1 - g' psi_2); first and second derivatives:
                const double j1_01 = -p02;
                const double j2_01 = p11 - gp * p02;
                const double j1_20 = -p21, j1_11 = -p12, j1_02 = -p03;
                const double j2_20 = p30 - gppp * p01 - 2.0 * gpp * p11 - gp * p21;
                const double j2_11 = p21 - gpp * p02 - gp * p12;
                const double j2_02 = p12 - gp * p03;
                // tcurl(j) = d1(j2) - d2(j1) - g' d2(j2), differentiated once:
                const double tc_10 = j2_20 - j1_11 - gpp * j2_01 - gp * j2_11;
                const double tc_01 = j2_11 - j1_02 - gp * j2_02;
                const Vec2 lhs = J.F_invT * Vec2{tc_10, tc_01};
                const double L1 = transformed_laplacian(gp, gpp, j1_20, j1_11,
                                                        j1_02, j1_01);
                const double L2 = transformed_laplacian(gp, gpp, j2_20, j2_11,
                                                        j2_02, j2_01);
                rotdiv_r.update(lhs.x + L2);  // rot90 (L1,L2) = (-L2, L1)
                rotdiv_r.update(lhs.y - L1);
            }
        }
    }

    IdentityReport rep;
    rep.entries = {{"transform.gradient", grad_r.v},
                   {"transform.laplacian", lap_r.v},
                   {"transform.divergence", div_r.v},
                   {"transform.matrix_divergence", mdiv_r.v},
                   {"identity.scalar_gradient", sgrad_r.v},
                   {"identity.curl_div_free", curldiv_r.v},
                   {"identity.product_rule", prod_r.v},
                   {"identity.curl_of_gradient", curlgrad_r.v},
                   {"identity.rotated_divergence", rotdiv_r.v}};
    return rep;
}

}  // namespace

IdentityReport verify_identities(const CurveSpec& spec, int resolution) {
    return run(spec, resolution,
               [](const TrigField& f) { return analytic(f); });
}

IdentityReport verify_identities_fd(const CurveSpec& spec, int resolution,
                                    double h) {
    return run(spec, resolution,
               [h](const TrigField& f) { return finite_difference(f, h); });
}

}  // namespace slipflow
