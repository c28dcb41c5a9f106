#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace slipflow {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 1.0;
};

/// Ordinary least squares y = slope * x + intercept with R^2.
inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    LineFit out;
    const std::size_t n = x.size();
    if (n < 2) return out;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    const double d = n * sxx - sx * sx;
    out.slope = (n * sxy - sx * sy) / d;
    out.intercept = (sy - out.slope * sx) / n;
    const double ss_tot = syy - sy * sy / n;
    double ss_res = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - (out.slope * x[i] + out.intercept);
        ss_res += e * e;
    }
    out.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return out;
}

/// Fit of log(y) against log(x); slope is the algebraic convergence rate.
inline LineFit fit_loglog(const std::vector<double>& x,
                          const std::vector<double>& y) {
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    return fit_line(lx, ly);
}

}  // namespace slipflow
