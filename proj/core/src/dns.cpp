#include "slipflow/dns.hpp"

#include <atomic>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <thread>

#include "slipflow/errors.hpp"
#include "slipflow/fit.hpp"

namespace slipflow {

namespace {

void parallel_for(int n, int jobs, const std::function<void(int)>& body) {
    jobs = std::max(1, std::min(jobs, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < jobs; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace

MixedField solve_eps_problem(const CurveSpec& spec, const BodyForce& f,
                             double eps, const MicroMeshParams& params) {
    auto mesh = std::make_shared<PeriodicMesh>(build_eps_mesh(
        params.inclusion, eps, params.L, params.h_free, params.K_depth,
        params.elems_per_pore_diameter, params.h_macro));
    auto space = std::make_shared<FemSpace>(mesh);
    StokesBC bc;
    bc.dirichlet_tags = {BTag::pore, BTag::top, BTag::bottom};
    StokesSolver solver(space, Metric::from_curve(spec), bc, Gauge::zero_mean);
    return solver.solve(f);
}

double fourier_trace_norm(const std::vector<double>& samples, double L,
                          double order) {
    const int n = static_cast<int>(samples.size());
    const std::complex<double> im(0.0, 1.0);
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
        std::complex<double> c(0.0, 0.0);
        for (int j = 0; j < n; ++j)
            c += samples[j] *
                 std::exp(-2.0 * std::numbers::pi * im *
                          (static_cast<double>(j) * k / n));
        c /= static_cast<double>(n);
        const int m = k <= n / 2 ? k : k - n;
        acc += std::pow(1.0 + static_cast<double>(m) * m, order) * std::norm(c);
    }
    return std::sqrt(L * acc);
}

EpsRecord error_report(const MixedField& ueps, const EffectiveSolution& eff,
                       const CurveSpec& spec, const BodyForce& f,
                       const EffectiveCoefficients& coeffs) {
    EpsRecord r;
    r.eps = eff.eps;
    r.M_eff = eff.M_eff;

    const auto& mesh = ueps.space->mesh();
    const double L = mesh.xmax - mesh.xmin;
    const FieldEvaluator eval_eff(eff.ueff);

    // Pressure gauge alignment: p_eff has zero mean on Omega_1 already;
    // shift the microscale pressure to zero mean over Omega_1.
    double area_O1 = 0.0;
    for (int t = 0; t < mesh.num_tris(); ++t)
        if (mesh.tri_region[t] == Region::above_s) area_O1 += mesh.tri_area(t);
    const double p_mean =
        integrate_region(ueps, Region::above_s,
                         [](Vec2, Vec2, const Mat2&, double p) { return p; }, 4) /
        area_O1;

    double l2u = 0, h1u = 0, l1p = 0, l1g = 0, wg = 0, wp = 0, m_eps = 0;
    const QuadRule& rule = tri_quadrature(4);
    for (int t = 0; t < mesh.num_tris(); ++t) {
        if (mesh.tri_region[t] != Region::above_s) continue;
        const ElementGeometry eg = element_geometry(mesh, t);
        for (const auto& q : rule.points) {
            const Vec2 x = eg.p[0] * q.l1 + eg.p[1] * q.l2 + eg.p[2] * q.l3;
            const Vec2 u1 = ueps.velocity(t, q.l1, q.l2, q.l3);
            const Mat2 J1 = ueps.velocity_jacobian(t, q.l1, q.l2, q.l3);
            const double p1 = ueps.pressure(t, q.l1, q.l2, q.l3) - p_mean;
            const Vec2 u2 = eval_eff.velocity(x);
            const Mat2 J2 = eval_eff.velocity_jacobian(x);
            const double p2 = eval_eff.pressure(x);
            const double w = q.w * eg.area;
            const Vec2 du = u1 - u2;
            const Mat2 dJ = J1 - J2;
            const double dp = p1 - p2;
            l2u += w * du.squared_norm();
            h1u += w * dJ.frobenius_sq();
            l1p += w * std::abs(dp);
            l1g += w * dJ.frobenius();
            wg += w * std::abs(x.y) * dJ.frobenius_sq();
            wp += w * std::abs(x.y) * dp * dp;
            const double gp = spec.dg(x.x);
            m_eps += w * (u1.x + gp * u1.y);
        }
    }
    r.err_u_L2_O1 = std::sqrt(l2u);
    const double h1_full = std::sqrt(l2u + h1u);
    r.err_u_H12_O1 = std::sqrt(r.err_u_L2_O1) * std::sqrt(h1_full);
    r.err_p_L1_O1 = l1p;
    r.err_gradu_L1_O1 = l1g;
    r.err_weighted_grad = std::sqrt(wg);
    r.err_weighted_p = std::sqrt(wp);
    r.M_eps = m_eps;

    // Porous-region magnitude and plane-averaged Darcy comparison.
    const double l2o2 = integrate_region(
        ueps, Region::below_s,
        [](Vec2, Vec2 u, const Mat2&, double) { return u.squared_norm(); }, 4);
    r.u_L2_O2eps = std::sqrt(l2o2);
    r.u_ratio_O2 = r.u_L2_O2eps / (r.eps * r.eps);

    int rows = 0;
    for (const auto& b : mesh.layer_bands)
        if (b.label < 0) rows = std::max(rows, -b.label);
    const int mid = std::max(1, (rows + 1) / 2);
    const auto* band = mesh.band(-mid);
    if (band) {
        const double band_area = L * (band->y1 - band->y0);
        Vec2 micro_avg;
        micro_avg.x = integrate_band(ueps, -mid,
                                     [](Vec2, Vec2 u, const Mat2&, double) {
                                         return u.x;
                                     }, 4) /
                      band_area / (r.eps * r.eps);
        micro_avg.y = integrate_band(ueps, -mid,
                                     [](Vec2, Vec2 u, const Mat2&, double) {
                                         return u.y;
                                     }, 4) /
                      band_area / (r.eps * r.eps);
        const Locator loc(eff.darcy.space->mesh());
        const double yc = 0.5 * (band->y0 + band->y1);
        Vec2 darcy_avg;
        const int nd = 64;
        for (int j = 0; j < nd; ++j) {
            int t;
            double l1, l2, l3;
            if (!loc.locate({L * (j + 0.5) / nd, yc}, t, l1, l2, l3))
                throw NumericalError("darcy comparison point outside Omega_2");
            darcy_avg += darcy_flux(eff.darcy, spec, f, coeffs, t, l1, l2, l3) /
                         static_cast<double>(nd);
        }
        r.darcy_mismatch = (micro_avg - darcy_avg).norm();
    }

    // Interface traces on a uniform 256-point grid.
    const int N = 256;
    const Locator loc_micro(mesh);
    std::vector<double> du1(N), du2(N), dp(N);
    double l2s = 0.0;
    for (int j = 0; j < N; ++j) {
        const Vec2 x{L * j / N, 0.0};
        int t;
        double l1, l2, l3;
        if (!loc_micro.locate(x, t, l1, l2, l3))
            throw NumericalError("interface trace point not found");
        const Vec2 u1 = ueps.velocity(t, l1, l2, l3);
        const double p1 = ueps.pressure(t, l1, l2, l3) - p_mean;
        const Vec2 u2 = eval_eff.velocity(x);
        const double p2 = eval_eff.pressure(x);
        du1[j] = u1.x - u2.x;
        du2[j] = u1.y - u2.y;
        dp[j] = p1 - p2;
        l2s += (Vec2{du1[j], du2[j]}).squared_norm() * (L / N);
    }
    r.err_u_L2_Sigma = std::sqrt(l2s);
    const double n1 = fourier_trace_norm(du1, L, -0.5);
    const double n2 = fourier_trace_norm(du2, L, -0.5);
    r.err_u_Hm12_Sigma = std::sqrt(n1 * n1 + n2 * n2);
    r.err_p_Hm12_Sigma = fourier_trace_norm(dp, L, -0.5);
    return r;
}

const FittedRate& ConvergenceReport::rate(const std::string& name) const {
    for (const auto& r : rates)
        if (r.name == name) return r;
    throw ConfigError("ConvergenceReport: no rate named " + name);
}

ConvergenceReport sweep_fit(const CurveSpec& spec, const BodyForce& f,
                            const EffectiveCoefficients& coeffs,
                            const std::vector<double>& eps_list,
                            const MicroMeshParams& params,
                            std::shared_ptr<const FemSpace> space_O1,
                            std::shared_ptr<const FemSpace> space_O2, int jobs) {
    if (eps_list.size() < 3)
        throw ConfigError("sweep_fit: need at least 3 epsilon values");
    for (std::size_t i = 1; i < eps_list.size(); ++i)
        if (!(eps_list[i] < eps_list[i - 1]))
            throw ConfigError("sweep_fit: eps list must be strictly decreasing");

    ConvergenceReport rep;
    rep.records.resize(eps_list.size());
    parallel_for(
        static_cast<int>(eps_list.size()), jobs, [&](int i) {
            const double eps = eps_list[i];
            const MixedField ueps = solve_eps_problem(spec, f, eps, params);
            const EffectiveSolution eff =
                solve_effective(spec, f, coeffs, eps, space_O1, space_O2);
            rep.records[i] = error_report(ueps, eff, spec, f, coeffs);
        });

    auto add_rate = [&](const std::string& name, auto getter) {
        std::vector<double> xs, ys;
        bool monotone = true;
        double prev = -1.0;
        for (const auto& rec : rep.records) {
            const double v = getter(rec);
            xs.push_back(rec.eps);
            ys.push_back(std::max(v, 1e-300));
            if (prev >= 0.0 && v >= prev) monotone = false;
            prev = v;
        }
        const LineFit fit = fit_loglog(xs, ys);
        rep.rates.push_back({name, fit.slope, fit.r2, monotone});
    };
    add_rate("u_L2_O1", [](const EpsRecord& r) { return r.err_u_L2_O1; });
    add_rate("u_H12_O1", [](const EpsRecord& r) { return r.err_u_H12_O1; });
    add_rate("p_L1_O1", [](const EpsRecord& r) { return r.err_p_L1_O1; });
    add_rate("gradu_L1_O1", [](const EpsRecord& r) { return r.err_gradu_L1_O1; });
    add_rate("weighted_grad", [](const EpsRecord& r) { return r.err_weighted_grad; });
    add_rate("weighted_p", [](const EpsRecord& r) { return r.err_weighted_p; });
    add_rate("u_L2_Sigma", [](const EpsRecord& r) { return r.err_u_L2_Sigma; });
    add_rate("u_Hm12_Sigma", [](const EpsRecord& r) { return r.err_u_Hm12_Sigma; });
    add_rate("p_Hm12_Sigma", [](const EpsRecord& r) { return r.err_p_Hm12_Sigma; });
    add_rate("M_gap",
             [](const EpsRecord& r) { return std::abs(r.M_eps - r.M_eff); });
    add_rate("darcy_mismatch",
             [](const EpsRecord& r) { return r.darcy_mismatch; });
    return rep;
}

}  // namespace slipflow
