#pragma once

#include <vector>

#include "slipflow/errors.hpp"

namespace slipflow {

/// Periodic cubic spline on a uniform grid x_i = i * L / n, i = 0..n-1.
/// Natural choice for the effective coefficients, which are smooth periodic
/// functions of x1.
class PeriodicSpline {
  public:
    PeriodicSpline() = default;
    PeriodicSpline(double period, std::vector<double> values);

    double operator()(double x) const;
    double derivative(double x) const;
    double period() const { return L_; }

  private:
    double L_ = 1.0;
    double h_ = 1.0;
    std::vector<double> v_;
    std::vector<double> m_;  ///< second derivatives at the knots
};

inline PeriodicSpline::PeriodicSpline(double period, std::vector<double> values)
    : L_(period), v_(std::move(values)) {
    const int n = static_cast<int>(v_.size());
    if (n < 3) throw ConfigError("PeriodicSpline: need at least 3 samples");
    h_ = L_ / n;
    // Cyclic tridiagonal system for the knot second derivatives:
    //   m_{i-1} + 4 m_i + m_{i+1} = 6 (v_{i-1} - 2 v_i + v_{i+1}) / h^2.
    // Dense Gaussian elimination; the grids here are tiny.
    std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
    std::vector<double> b(n);
    for (int i = 0; i < n; ++i) {
        A[i][(i + n - 1) % n] += 1.0;
        A[i][i] += 4.0;
        A[i][(i + 1) % n] += 1.0;
        b[i] = 6.0 *
               (v_[(i + n - 1) % n] - 2.0 * v_[i] + v_[(i + 1) % n]) /
               (h_ * h_);
    }
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        std::swap(A[c], A[piv]);
        std::swap(b[c], b[piv]);
        for (int r = 0; r < n; ++r) {
            if (r == c || A[r][c] == 0.0) continue;
            const double f = A[r][c] / A[c][c];
            for (int k = c; k < n; ++k) A[r][k] -= f * A[c][k];
            b[r] -= f * b[c];
        }
    }
    m_.resize(n);
    for (int i = 0; i < n; ++i) m_[i] = b[i] / A[i][i];
}

inline double PeriodicSpline::operator()(double x) const {
    const int n = static_cast<int>(v_.size());
    double t = std::fmod(x, L_);
    if (t < 0.0) t += L_;
    int i = static_cast<int>(t / h_);
    if (i >= n) i = n - 1;
    const double s = t - i * h_;
    const int j = (i + 1) % n;
    const double a = (h_ - s) / h_, bb = s / h_;
    return a * v_[i] + bb * v_[j] +
           ((a * a * a - a) * m_[i] + (bb * bb * bb - bb) * m_[j]) * h_ * h_ /
               6.0;
}

inline double PeriodicSpline::derivative(double x) const {
    const int n = static_cast<int>(v_.size());
    double t = std::fmod(x, L_);
    if (t < 0.0) t += L_;
    int i = static_cast<int>(t / h_);
    if (i >= n) i = n - 1;
    const double s = t - i * h_;
    const int j = (i + 1) % n;
    const double a = (h_ - s) / h_, bb = s / h_;
    return (v_[j] - v_[i]) / h_ +
           ((1.0 - 3.0 * a * a) * m_[i] + (3.0 * bb * bb - 1.0) * m_[j]) * h_ /
               6.0;
}

}  // namespace slipflow
