#include "prandtl/spectral_operator.hpp"

#include <cmath>
#include <stdexcept>

#include <lapacke.h>

namespace prandtl {

namespace {

// Energy form on a uniform grid given by (z_left, h):
//   -sum_mid (z_m^2+1)^3 ((u_{i+1}-u_i)/h)^2 h + 6 sum_i (z_i^2+1)^2 u_i^2 h
double energy_form(double z_left, double h, const std::vector<double>& u) {
    double grad = 0.0, mass6 = 0.0;
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        const double zm = z_left + (i + 0.5) * h;
        const double w3 = std::pow(zm * zm + 1.0, 3);
        const double du = (u[i + 1] - u[i]) / h;
        grad += w3 * du * du;
    }
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double z = z_left + i * h;
        const double w2 = (z * z + 1.0) * (z * z + 1.0);
        mass6 += w2 * u[i] * u[i];
    }
    return -grad * h + 6.0 * mass6 * h;
}

}  // namespace

WeightedOperator assemble(double Z, int N) {
    if (Z < 6.0) throw std::invalid_argument("assemble: Z too small to contain the eigenfunction");
    if (N < 200 || N % 2 != 0) throw std::invalid_argument("assemble: N must be even and >= 200");

    WeightedOperator op;
    op.Z = Z;
    op.N = N;
    const double h = 2.0 * Z / N;
    op.z_nodes.resize(N + 1);
    op.weight4.resize(N + 1);
    for (int i = 0; i <= N; ++i) {
        const double z = -Z + i * h;
        op.z_nodes[i] = z;
        op.weight4[i] = std::pow(z * z + 1.0, 4);
    }
    // interior tridiagonal stiffness + diagonal mass (Dirichlet ends)
    const int n = N - 1;
    op.diag.resize(n);
    op.off.resize(n - 1);
    op.mass.resize(n);
    auto w3mid = [&](int i) {  // midpoint between node i and i+1
        const double zm = -Z + (i + 0.5) * h;
        return std::pow(zm * zm + 1.0, 3);
    };
    for (int k = 0; k < n; ++k) {
        const int i = k + 1;  // grid index
        const double z = op.z_nodes[i];
        const double w2 = (z * z + 1.0) * (z * z + 1.0);
        op.diag[k] = -(w3mid(i - 1) + w3mid(i)) / h + 6.0 * h * w2;
        op.mass[k] = op.weight4[i] * h;
        if (k + 1 < n) op.off[k] = w3mid(i) / h;
    }
    return op;
}

double quadratic_form_raw(const WeightedOperator& op, const std::vector<double>& u) {
    if (static_cast<int>(u.size()) != op.N + 1)
        throw std::invalid_argument("quadratic_form: dimension mismatch");
    const double h = 2.0 * op.Z / op.N;
    return energy_form(-op.Z, h, u);
}

double quadratic_form(const WeightedOperator& op, const std::vector<double>& u) {
    if (static_cast<int>(u.size()) != op.N + 1)
        throw std::invalid_argument("quadratic_form: dimension mismatch");
    const double h = 2.0 * op.Z / op.N;
    const double fine = energy_form(-op.Z, h, u);
    // coarse grid = every second node, exactly the N/2 discretization
    std::vector<double> uc(op.N / 2 + 1);
    for (std::size_t i = 0; i < uc.size(); ++i) uc[i] = u[2 * i];
    const double coarse = energy_form(-op.Z, 2.0 * h, uc);
    return (4.0 * fine - coarse) / 3.0;  // O(h^2) pair extrapolated to O(h^4)
}

std::pair<double, std::vector<double>> top_eigenvalue(const WeightedOperator& op) {
    const int n = op.N - 1;
    // similarity transform to an ordinary symmetric tridiagonal problem
    std::vector<double> scale(n), d(n), e(n - 1);
    for (int k = 0; k < n; ++k) scale[k] = 1.0 / std::sqrt(op.mass[k]);
    for (int k = 0; k < n; ++k) d[k] = op.diag[k] * scale[k] * scale[k];
    for (int k = 0; k + 1 < n; ++k) e[k] = op.off[k] * scale[k] * scale[k + 1];

    std::vector<double> w(n), zvec(static_cast<std::size_t>(n));
    lapack_int m = 0;
    std::vector<lapack_int> isuppz(2);
    lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(),
                                     0.0, 0.0, n, n, 0.0, &m, w.data(), zvec.data(), n,
                                     isuppz.data());
    if (info != 0 || m != 1)
        throw std::runtime_error("top_eigenvalue: LAPACK dstevr failed");

    std::vector<double> u(n);
    for (int k = 0; k < n; ++k) u[k] = zvec[k] * scale[k];
    // weighted-L2 normalization, positive at the center
    double norm2 = 0.0;
    for (int k = 0; k < n; ++k) norm2 += op.mass[k] * u[k] * u[k];
    double s = 1.0 / std::sqrt(norm2);
    if (u[n / 2] < 0.0) s = -s;
    for (auto& v : u) v *= s;
    return {w[0], u};
}

cplx alpha_to_tau(double alpha) {
    if (alpha <= 0.0) throw std::invalid_argument("alpha_to_tau: alpha must be positive");
    const double r = std::sqrt(alpha / 2.0);
    return cplx(-r, -r);
}

}  // namespace prandtl
