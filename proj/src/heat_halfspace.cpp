#include "prandtl/heat_halfspace.hpp"

#include <cblas.h>

#include <cmath>
#include <stdexcept>

#include "prandtl/complexode.hpp"

namespace prandtl {

namespace {

inline double gauss(double t, double x) {
    return std::exp(-x * x / (4.0 * t)) / std::sqrt(4.0 * kPi * t);
}

// m-th derivative of G(t, .) at x
inline double gauss_dm(int m, double t, double x) {
    const double g = gauss(t, x);
    switch (m) {
        case 0: return g;
        case 1: return -x / (2.0 * t) * g;
        case 2: return (x * x / (4.0 * t * t) - 1.0 / (2.0 * t)) * g;
        case 3: return (-x * x * x / (8.0 * t * t * t) + 3.0 * x / (4.0 * t * t)) * g;
        default: throw std::invalid_argument("gauss_dm: derivative order out of range");
    }
}

}  // namespace

double kernel(double t, double y, double z) {
    if (t <= 0.0) throw std::invalid_argument("kernel: t must be positive");
    return gauss(t, y - z) - gauss(t, y + z);
}

std::vector<double> simpson_quadrature_weights(std::size_t n, double h) {
    if (n % 2 != 0) throw std::invalid_argument("simpson_quadrature_weights: n must be even");
    std::vector<double> w(n + 1, 1.0);
    for (std::size_t i = 1; i < n; i += 2) w[i] = 4.0;
    for (std::size_t i = 2; i < n; i += 2) w[i] = 2.0;
    for (auto& x : w) x *= h / 3.0;
    return w;
}

double weighted_norm(const std::vector<cplx>& U, const std::vector<double>& y, double alpha_w) {
    double best = 0.0;
    for (std::size_t i = 0; i < U.size(); ++i)
        best = std::max(best, std::exp(alpha_w * y[i]) * std::abs(U[i]));
    return best;
}

double weighted_norm(const std::vector<double>& U, const std::vector<double>& y, double alpha_w) {
    double best = 0.0;
    for (std::size_t i = 0; i < U.size(); ++i)
        best = std::max(best, std::exp(alpha_w * y[i]) * std::abs(U[i]));
    return best;
}

std::vector<double> kernel_matrix(double t, const std::vector<double>& y,
                                  const std::vector<double>& z,
                                  const std::vector<double>& wz, int deriv) {
    if (t <= 0.0) throw std::invalid_argument("kernel_matrix: t must be positive");
    const std::size_t ny = y.size(), nz = z.size();
    std::vector<double> K(ny * nz);
    for (std::size_t i = 0; i < ny; ++i)
        for (std::size_t j = 0; j < nz; ++j)
            K[i * nz + j] = (gauss_dm(deriv, t, y[i] - z[j]) - gauss_dm(deriv, t, y[i] + z[j])) * wz[j];
    return K;
}

std::vector<cplx> kernel_apply(const std::vector<double>& K, std::size_t ny, std::size_t nz,
                               const std::vector<cplx>& in) {
    std::vector<double> re(nz), im(nz), ore(ny), oim(ny);
    for (std::size_t j = 0; j < nz; ++j) { re[j] = in[j].real(); im[j] = in[j].imag(); }
    cblas_dgemv(CblasRowMajor, CblasNoTrans, static_cast<int>(ny), static_cast<int>(nz), 1.0,
                K.data(), static_cast<int>(nz), re.data(), 1, 0.0, ore.data(), 1);
    cblas_dgemv(CblasRowMajor, CblasNoTrans, static_cast<int>(ny), static_cast<int>(nz), 1.0,
                K.data(), static_cast<int>(nz), im.data(), 1, 0.0, oim.data(), 1);
    std::vector<cplx> out(ny);
    for (std::size_t i = 0; i < ny; ++i) out[i] = cplx(ore[i], oim[i]);
    return out;
}

std::vector<double> kernel_apply(const std::vector<double>& K, std::size_t ny, std::size_t nz,
                                 const std::vector<double>& in) {
    std::vector<double> out(ny);
    cblas_dgemv(CblasRowMajor, CblasNoTrans, static_cast<int>(ny), static_cast<int>(nz), 1.0,
                K.data(), static_cast<int>(nz), in.data(), 1, 0.0, out.data(), 1);
    return out;
}

std::vector<cplx> solve_duhamel(const std::vector<cplx>& U0, const std::vector<std::vector<cplx>>& F,
                                double t, const std::vector<double>& y,
                                const std::vector<double>& z, int nsigma) {
    if (t <= 0.0) throw std::invalid_argument("solve_duhamel: t must be positive");
    const std::size_t nz = z.size();
    const double hz = z[1] - z[0];
    const std::vector<double> wz = simpson_quadrature_weights(nz - 1, hz);

    std::vector<cplx> U = kernel_apply(kernel_matrix(t, y, z, wz), y.size(), nz, U0);
    if (F.empty()) return U;

    // source term: int_0^t S(t-s) F(s) ds = int_0^{sqrt t} 2 sigma S(sigma^2) F(t - sigma^2) dsigma
    if (nsigma % 2 != 0) ++nsigma;
    const double hs = std::sqrt(t) / nsigma;
    const double ds_f = t / (F.size() - 1);  // F slice spacing
    std::vector<cplx> acc(y.size(), cplx(0));
    for (int q = 1; q <= nsigma; ++q) {  // sigma = 0 endpoint integrand vanishes
        const double sigma = q * hs;
        const double s = t - sigma * sigma;
        // linear interpolation between stored F slices
        double pos = s / ds_f;
        std::size_t j0 = static_cast<std::size_t>(pos);
        if (j0 + 1 >= F.size()) j0 = F.size() - 2;
        const double frac = pos - j0;
        std::vector<cplx> Fs(nz);
        for (std::size_t i = 0; i < nz; ++i)
            Fs[i] = (1.0 - frac) * F[j0][i] + frac * F[j0 + 1][i];
        const auto contrib =
            kernel_apply(kernel_matrix(sigma * sigma, y, z, wz), y.size(), nz, Fs);
        double w = (q == nsigma) ? 1.0 : (q % 2 == 1 ? 4.0 : 2.0);  // Simpson weight
        w *= hs / 3.0;
        for (std::size_t i = 0; i < y.size(); ++i) acc[i] += w * 2.0 * sigma * contrib[i];
    }
    for (std::size_t i = 0; i < y.size(); ++i) U[i] += acc[i];
    return U;
}

ModeTrajectory evolve_mode_k(const std::vector<cplx>& U0, int k, const BaseFlow& flow,
                             double T, int nsteps, double Ly, double hy) {
    if (k < 0) throw std::invalid_argument("evolve_mode_k: k must be >= 0");
    if (nsteps < 1) throw std::invalid_argument("evolve_mode_k: nsteps must be >= 1");

    std::size_t n = static_cast<std::size_t>(std::llround(Ly / hy));
    if (n % 2 == 1) --n;  // even interval count for Simpson weights
    std::vector<double> y(n + 1);
    for (std::size_t i = 0; i <= n; ++i) y[i] = i * hy;
    const std::vector<double> wz = simpson_quadrature_weights(n, hy);

    const double dt = T / nsteps;
    const auto Kdt = kernel_matrix(dt, y, y, wz);
    const auto Khalf = kernel_matrix(dt / 2.0, y, y, wz);

    std::vector<double> Us(n + 1), Usp(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        Us[i] = flow.Us(y[i]);
        Usp[i] = flow.Us1(y[i]);
    }

    std::vector<cplx> U = U0;
    if (U.size() != y.size()) throw std::invalid_argument("evolve_mode_k: U0 size mismatch");

    auto Frhs = [&](const std::vector<cplx>& W) {
        const std::vector<cplx> I = cumulative_simpson(W, hy);
        std::vector<cplx> out(W.size());
        const cplx ik(0.0, static_cast<double>(k));
        for (std::size_t i = 0; i < W.size(); ++i) out[i] = ik * (Usp[i] * I[i] - Us[i] * W[i]);
        return out;
    };

    ModeTrajectory traj;
    traj.k = k;
    traj.y = y;
    traj.t.reserve(nsteps + 1);
    traj.wnorms.reserve(nsteps + 1);
    traj.t.push_back(0.0);
    traj.wnorms.push_back(weighted_norm(U, y));

    // Doubling check on the first step: one dt step must agree with two dt/2
    // steps, or the step size is unstable for this k.
    {
        const auto Kquarter = kernel_matrix(dt / 4.0, y, y, wz);
        auto one_step = [&](const std::vector<cplx>& W, const std::vector<double>& Kfull,
                            const std::vector<double>& Kmid, double step_dt) {
            const auto F0 = Frhs(W);
            auto Wmid = kernel_apply(Kmid, n + 1, n + 1, W);
            for (std::size_t i = 0; i <= n; ++i) Wmid[i] += (step_dt / 2.0) * F0[i];
            const auto Fm = Frhs(Wmid);
            auto Wnew = kernel_apply(Kfull, n + 1, n + 1, W);
            const auto KFm = kernel_apply(Kmid, n + 1, n + 1, Fm);
            for (std::size_t i = 0; i <= n; ++i) Wnew[i] += step_dt * KFm[i];
            return Wnew;
        };
        const auto full = one_step(U, Kdt, Khalf, dt);
        const auto halves =
            one_step(one_step(U, Khalf, Kquarter, dt / 2.0), Khalf, Kquarter, dt / 2.0);
        std::vector<cplx> diff(full.size());
        for (std::size_t i = 0; i < full.size(); ++i) diff[i] = full[i] - halves[i];
        const double scale = std::max(weighted_norm(full, y), 1e-300);
        if (!(weighted_norm(diff, y) <= 0.05 * scale))
            throw NonConvergenceError(
                "evolve_mode_k: step-size instability (doubling check failed)");
    }

    for (int step = 0; step < nsteps; ++step) {
        const auto Fn = Frhs(U);
        auto Umid = kernel_apply(Khalf, n + 1, n + 1, U);
        for (std::size_t i = 0; i <= n; ++i) Umid[i] += (dt / 2.0) * Fn[i];
        const auto Fmid = Frhs(Umid);
        auto Unew = kernel_apply(Kdt, n + 1, n + 1, U);
        const auto KF = kernel_apply(Khalf, n + 1, n + 1, Fmid);
        for (std::size_t i = 0; i <= n; ++i) Unew[i] += dt * KF[i];
        U = std::move(Unew);
        traj.t.push_back((step + 1) * dt);
        traj.wnorms.push_back(weighted_norm(U, y));
    }
    traj.U = std::move(U);
    return traj;
}

std::vector<double> evolve_base_flow(const std::vector<double>& Us0, double t,
                                     const std::vector<double>& z, const std::vector<double>& y) {
    if (t == 0.0) return std::vector<double>(Us0.begin(), Us0.begin() + y.size());
    const double hz = z[1] - z[0];
    const auto wz = simpson_quadrature_weights(z.size() - 1, hz);
    return kernel_apply(kernel_matrix(t, y, z, wz), y.size(), z.size(), Us0);
}

double base_flow_deriv(int m, double t, double y0, const std::vector<double>& Us0,
                       const std::vector<double>& z, const std::vector<double>& wz) {
    double acc = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j)
        acc += (gauss_dm(m, t, y0 - z[j]) - gauss_dm(m, t, y0 + z[j])) * wz[j] * Us0[j];
    return acc;
}

double us_heat(double t, double y) { return us_heat_dy(0, t, y); }

double us_heat_dy(int m, double t, double y) {
    const double s = 1.0 + 4.0 * t;
    const double g = 2.0 * std::pow(s, -1.5) * std::exp(-y * y / s);
    switch (m) {
        case 0: return g * y;
        case 1: return g * (1.0 - 2.0 * y * y / s);
        case 2: return g * (-2.0 * y / s) * (3.0 - 2.0 * y * y / s);
        case 3: return g * (-8.0 * y * y * y * y / (s * s * s) + 24.0 * y * y / (s * s) - 6.0 / s);
        default: throw std::invalid_argument("us_heat_dy: derivative order out of range");
    }
}

double critical_point_exact(double t) { return std::sqrt((1.0 + 4.0 * t) / 2.0); }

LinearFit growth_fit(const std::vector<double>& t, const std::vector<double>& wnorms,
                     double t_min) {
    std::vector<double> x, ylog;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= t_min && wnorms[i] > 0.0) {
            x.push_back(t[i]);
            ylog.push_back(std::log(wnorms[i]));
        }
    }
    return linear_fit(x, ylog);
}

void export_trajectory(const std::string& path, const ModeTrajectory& traj) {
    CsvWriter csv(path, {"t", "wnorm", "growth_estimate"});
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        double est = 0.0;
        if (i > 0 && traj.wnorms[i] > 0.0 && traj.wnorms[i - 1] > 0.0)
            est = std::log(traj.wnorms[i] / traj.wnorms[i - 1]) / (traj.t[i] - traj.t[i - 1]);
        csv.row({traj.t[i], traj.wnorms[i], est});
    }
}

}  // namespace prandtl
