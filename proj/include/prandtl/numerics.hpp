#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace prandtl {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Composite Simpson on a uniform grid (n+1 samples, spacing h).  Odd interval
// counts close with a 3/8 rule on the final three intervals.
template <class T>
T simpson(const std::vector<T>& f, double h) {
    const std::size_t n = f.size() - 1;  // intervals
    if (n == 0) return T(0);
    if (n == 1) return (f[0] + f[1]) * (h / 2.0);
    std::size_t m = n;
    T tail(0);
    if (m % 2 != 0) {
        // 3/8 rule on the last three intervals
        m -= 3;
        tail = (f[m] + 3.0 * f[m + 1] + 3.0 * f[m + 2] + f[m + 3]) * (3.0 * h / 8.0);
    }
    T s = f[0] + f[m];
    for (std::size_t i = 1; i < m; i += 2) s += 4.0 * f[i];
    for (std::size_t i = 2; i < m; i += 2) s += 2.0 * f[i];
    return s * (h / 3.0) + tail;
}

template <class T>
T trapezoid(const std::vector<T>& f, double h) {
    T s(0);
    for (std::size_t i = 0; i + 1 < f.size(); ++i) s += f[i] + f[i + 1];
    return s * (h / 2.0);
}

// Cumulative Simpson antiderivative F with F[0] = 0 on a uniform grid.
// Interior odd nodes use the local quadratic through (i-2, i-1, i); the first
// node uses the quadratic through (0, 1, 2).  Matches composite Simpson at
// even nodes.  (Hand-rolled: complex-valued inputs must not be demoted.)
template <class T>
std::vector<T> cumulative_simpson(const std::vector<T>& f, double h) {
    const std::size_t n = f.size();
    std::vector<T> F(n, T(0));
    if (n < 2) return F;
    if (n == 2) {
        F[1] = (f[0] + f[1]) * (h / 2.0);
        return F;
    }
    F[1] = (5.0 * f[0] + 8.0 * f[1] - f[2]) * (h / 12.0);
    for (std::size_t i = 2; i < n; ++i) {
        if (i % 2 == 0) {
            F[i] = F[i - 2] + (f[i - 2] + 4.0 * f[i - 1] + f[i]) * (h / 3.0);
        } else {
            F[i] = F[i - 1] + (-f[i - 2] + 8.0 * f[i - 1] + 5.0 * f[i]) * (h / 12.0);
        }
    }
    return F;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

// Ordinary least squares y ~ intercept + slope*x with coefficient of
// determination.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// Fornberg finite-difference weights for derivative order m at point x0 given
// arbitrary nodes x; returns one weight per node.
std::vector<double> fornberg_weights(const std::vector<double>& x, double x0, int m);

// Natural cubic spline through (x, y) with x strictly increasing; evaluates
// inside [x.front(), x.back()] (clamped outside).  Complex-valued y supported.
class CubicSpline {
  public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> x, std::vector<cplx> y);
    cplx operator()(double t) const;
    cplx derivative(double t) const;
    cplx second_derivative(double t) const;

  private:
    std::vector<double> x_;
    std::vector<cplx> y_, m_;  // m_: second derivatives at nodes
    std::size_t locate(double t) const;
};

// Monotone cubic (PCHIP, Fritsch-Carlson weighted-harmonic slopes) through
// (x, y) with x strictly increasing; shape preserving, no overshoot at jumps.
class PchipInterpolator {
  public:
    PchipInterpolator() = default;
    PchipInterpolator(std::vector<double> x, std::vector<double> y);
    double operator()(double t) const;

  private:
    std::vector<double> x_, y_, d_;  // d_: node derivatives
};

// Minimal CSV writer: optional "# ..." convention line, header once, then
// rows of doubles.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns,
              const std::string& comment = "");
    ~CsvWriter();
    void row(const std::vector<double>& values);

  private:
    struct Impl;
    Impl* impl_;
};

std::string output_dir(const std::string& cli_out);  // PRANDTL_LAB_OUT override

}  // namespace prandtl
