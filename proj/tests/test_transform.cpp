#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "slipflow/curve.hpp"
#include "slipflow/identities.hpp"

using namespace slipflow;

TEST_CASE("flat curve gives the identity Jacobian") {
    const CurveSpec flat = CurveSpec::flat();
    for (const double z1 : {0.0, 0.3, 0.77, 5.1}) {
        const JacobianSample j = jacobian(flat, z1);
        CHECK(j.F(0, 0) == 1.0);
        CHECK(j.F(1, 0) == 0.0);
        CHECK(j.eig_lo == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(j.eig_hi == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("Jacobian of a sine interface at z1 = 0") {
    const double a = 0.3, L = 2.0;
    const CurveSpec spec = CurveSpec::sine(a, L);
    const JacobianSample j = jacobian(spec, 0.0);
    // g'(0) = 2 pi a / L
    CHECK(j.F(1, 0) == doctest::Approx(2.0 * std::numbers::pi * a / L).epsilon(1e-14));
    CHECK(j.F(0, 0) == 1.0);
    CHECK(j.F(0, 1) == 0.0);
    CHECK(j.F(1, 1) == 1.0);
    CHECK(j.F.det() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("metric eigenvalues match the closed forms") {
    // g' = 1: lambda = 1 + 1/2 +- sqrt(1 + 1/4)
    const JacobianSample j = jacobian_from_slope(1.0);
    CHECK(j.eig_hi == doctest::Approx(1.5 + std::sqrt(1.25)).epsilon(1e-12));
    CHECK(j.eig_lo == doctest::Approx(1.5 - std::sqrt(1.25)).epsilon(1e-12));
    CHECK(j.eig_hi == doctest::Approx(2.618034).epsilon(1e-6));
    CHECK(j.eig_lo == doctest::Approx(0.381966).epsilon(1e-5));
    CHECK(j.eig_lo * j.eig_hi == doctest::Approx(1.0).epsilon(1e-14));

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> gp(-2.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        const JacobianSample s = jacobian_from_slope(gp(rng));
        CHECK(std::abs(s.F.det() - 1.0) < 1e-15);
        CHECK(std::abs(s.metric(0, 1) - s.metric(1, 0)) == 0.0);
        CHECK(s.eig_lo > 0.0);
        CHECK(s.eig_lo <= 1.0 + 1e-14);
        CHECK(s.eig_hi >= 1.0 - 1e-14);
        CHECK(s.eig_lo * s.eig_hi == doctest::Approx(1.0).epsilon(1e-12));
        // closed form from the eigenvalue computation
        const double g2 = s.gprime * s.gprime;
        const double lam1 = 1.0 + 0.5 * g2 + std::sqrt(g2 + 0.25 * g2 * g2);
        CHECK(s.eig_hi == doctest::Approx(lam1).epsilon(1e-12));
        // eigenvalues of the metric matrix itself
        const double tr = s.metric.trace(), det = s.metric.det();
        const double disc = std::sqrt(tr * tr / 4.0 - det);
        CHECK(s.eig_hi == doctest::Approx(tr / 2.0 + disc).epsilon(1e-12));
        CHECK(det == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("Jacobian ignores z2 and periodicity is exact") {
    const CurveSpec spec(1.0, {0.05, 0.02}, {0.1});
    for (const double z1 : {0.12, 0.5, 0.93}) {
        CHECK(spec.g(z1) == spec.g(z1 + 1.0));
        CHECK(spec.g(z1) == spec.g(z1 - 3.0));
        CHECK(jacobian(spec, z1).F(1, 0) == jacobian(spec, z1 + 2.0).F(1, 0));
    }
}

TEST_CASE("map/unmap round trip") {
    SUBCASE("flat map is the identity") {
        const CurveSpec flat = CurveSpec::flat();
        const Vec2 z{0.37, -1.2};
        const Vec2 x = map_point(flat, z);
        CHECK(x.x == z.x);
        CHECK(x.y == z.y);
    }
    SUBCASE("sine at the quarter period") {
        const CurveSpec spec = CurveSpec::sine(0.1, 1.0);
        const Vec2 x = map_point(spec, {0.25, 0.0});
        CHECK(x.x == doctest::Approx(0.25));
        CHECK(x.y == doctest::Approx(0.1).epsilon(1e-14));
    }
    SUBCASE("random round trips") {
        const CurveSpec spec(1.5, {0.07, -0.03, 0.01}, {0.12, 0.04});
        std::mt19937 rng(11);
        std::uniform_real_distribution<double> d(-5.0, 5.0);
        for (int i = 0; i < 1000; ++i) {
            const Vec2 z{d(rng), d(rng)};
            const Vec2 back = unmap_point(spec, map_point(spec, z));
            CHECK(std::abs(back.x - z.x) < 1e-14);
            CHECK(std::abs(back.y - z.y) < 1e-14);
        }
    }
}

TEST_CASE("transformed normal and tangent") {
    SUBCASE("flat: e2 maps to e2 / e1") {
        const auto f = transform_vectors(CurveSpec::flat(), 0.3, {0.0, 1.0});
        CHECK(f.normal.x == doctest::Approx(0.0));
        CHECK(f.normal.y == doctest::Approx(1.0));
        CHECK(f.tangent.x == doctest::Approx(-1.0));
        CHECK(std::abs(f.tangent.y) < 1e-15);
    }
    SUBCASE("slope one: F^{-T} e2 normalized") {
        // g'(x1) = 1 at x1 = 0 for g = x1-derivative 1: use sine with a = L/(2 pi)
        const CurveSpec spec = CurveSpec::sine(1.0 / (2.0 * std::numbers::pi), 1.0);
        const auto f = transform_vectors(spec, 0.0, {0.0, 1.0});
        CHECK(f.normal.x == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-12));
        CHECK(f.normal.y == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    }
    SUBCASE("orthogonality over random inputs") {
        const CurveSpec spec(1.0, {0.04}, {0.11, -0.02});
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> d(0.0, 1.0);
        for (int i = 0; i < 500; ++i) {
            const double th = 2.0 * std::numbers::pi * d(rng);
            const auto f =
                transform_vectors(spec, d(rng), {std::cos(th), std::sin(th)});
            CHECK(std::abs(f.normal.dot(f.tangent)) < 1e-14);
            CHECK(f.normal.norm() == doctest::Approx(1.0).epsilon(1e-14));
            CHECK(f.tangent.norm() == doctest::Approx(1.0).epsilon(1e-14));
        }
    }
}

TEST_CASE("transformation identities on manufactured fields") {
    SUBCASE("flat curve reduces to classical vector calculus") {
        const IdentityReport rep = verify_identities(CurveSpec::flat(), 32);
        CHECK(rep.max_residual() < 1e-12);
    }
    SUBCASE("curved interface, analytic derivatives") {
        const IdentityReport rep =
            verify_identities(CurveSpec::sine(0.2, 1.0), 64);
        for (const auto& e : rep.entries) {
            INFO(e.name);
            CHECK(e.residual < 1e-10);
        }
    }
    SUBCASE("finite differences converge at second order") {
        const CurveSpec spec = CurveSpec::sine(0.2, 1.0);
        const double rh = verify_identities_fd(spec, 10, 1e-3)["transform.laplacian"].residual;
        const double rh2 = verify_identities_fd(spec, 10, 5e-4)["transform.laplacian"].residual;
        CHECK(rh / rh2 == doctest::Approx(4.0).epsilon(0.15));
    }
}
