#include "slipflow/curve.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "slipflow/errors.hpp"

namespace slipflow {

CurveSpec::CurveSpec(double period, std::vector<double> cos_amp,
                     std::vector<double> sin_amp)
    : period_(period), cos_amp_(std::move(cos_amp)), sin_amp_(std::move(sin_amp)) {
    if (!(period_ > 0.0)) throw ConfigError("CurveSpec: period must be positive");
}

CurveSpec CurveSpec::sine(double amplitude, double period) {
    return CurveSpec(period, {}, {amplitude});
}

double CurveSpec::eval(double z, int order) const {
    // Reduce mod L first so g(z + L) == g(z) holds exactly in floating point.
    double t = std::fmod(z, period_);
    if (t < 0.0) t += period_;
    const double w0 = 2.0 * std::numbers::pi / period_;

    double acc = 0.0;
    const std::size_t n = std::max(cos_amp_.size(), sin_amp_.size());
    for (std::size_t k = 1; k <= n; ++k) {
        const double ak = k <= cos_amp_.size() ? cos_amp_[k - 1] : 0.0;
        const double bk = k <= sin_amp_.size() ? sin_amp_[k - 1] : 0.0;
        const double w = w0 * static_cast<double>(k);
        const double c = std::cos(w * t);
        const double s = std::sin(w * t);
        double wp = 1.0;
        for (int j = 0; j < order; ++j) wp *= w;
        // d^m/dz^m [a cos + b sin] cycles with period 4 in m.
        switch (order % 4) {
            case 0: acc += wp * (ak * c + bk * s); break;
            case 1: acc += wp * (-ak * s + bk * c); break;
            case 2: acc += wp * (-ak * c - bk * s); break;
            default: acc += wp * (ak * s - bk * c); break;
        }
    }
    return acc;
}

JacobianSample jacobian_from_slope(double gp) {
    JacobianSample j;
    j.gprime = gp;
    j.F = Mat2(1.0, 0.0, gp, 1.0);
    j.F_inv = Mat2(1.0, 0.0, -gp, 1.0);
    j.F_invT = Mat2(1.0, -gp, 0.0, 1.0);
    j.metric = Mat2(1.0, -gp, -gp, 1.0 + gp * gp);
    const double s = std::sqrt(gp * gp + 0.25 * gp * gp * gp * gp);
    j.eig_hi = 1.0 + 0.5 * gp * gp + s;
    j.eig_lo = 1.0 + 0.5 * gp * gp - s;
    return j;
}

JacobianSample jacobian(const CurveSpec& spec, double z1) {
    return jacobian_from_slope(spec.dg(z1));
}

Vec2 map_point(const CurveSpec& spec, Vec2 z) { return {z.x, z.y + spec.g(z.x)}; }

Vec2 unmap_point(const CurveSpec& spec, Vec2 x) { return {x.x, x.y - spec.g(x.x)}; }

TransformedFrame transform_vectors(const CurveSpec& spec, double x1, Vec2 nu) {
    const JacobianSample j = jacobian(spec, x1);
    TransformedFrame out;
    out.normal = (j.F_invT * nu).normalized();
    out.tangent = (j.F * nu.perp()).normalized();
    return out;
}

}  // namespace slipflow
