#include "prandtl/complexode.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace prandtl {

namespace {

struct State {
    cplx X, dX;
};

// First-order system for the reduced ODE; throws on coefficient singularity.
inline State rhs(cplx tau, double z, const State& s) {
    const cplx coef = tau - z * z;
    if (std::abs(coef) < 1e-12)
        throw SingularCoefficientError("tau - z^2 vanishes on the integration path");
    const cplx i(0.0, 1.0);
    // X'' = [6 i z X' - ((tau - z^2)^2 - 6i) X] / (i (tau - z^2))
    const cplx num = 6.0 * i * z * s.dX - (coef * coef - 6.0 * i) * s.X;
    return State{s.dX, num / (i * coef)};
}

inline State axpy(const State& a, double c, const State& b) {
    return State{a.X + c * b.X, a.dX + c * b.dX};
}

}  // namespace

std::pair<cplx, cplx> seed_asymptotic(cplx tau, double z0) {
    if (z0 <= 0.0) throw std::invalid_argument("seed_asymptotic: z0 must be positive");
    const cplx i(0.0, 1.0);
    const cplx expo = -i * tau / (2.0 * kLambda) - 3.5;
    return {cplx(1.0, 0.0), -kLambda * z0 + expo / z0};
}

ShootingTrajectory integrate_backward(cplx tau, double z0, int steps, cplx seed_scale) {
    if (steps < 1000) throw std::invalid_argument("integrate_backward: steps < 1000");
    if (z0 <= 0.0) throw std::invalid_argument("integrate_backward: z0 must be positive");

    ShootingTrajectory traj;
    traj.tau = tau;
    traj.z_nodes.resize(steps + 1);
    traj.X.resize(steps + 1);
    traj.dX.resize(steps + 1);

    const double h = -z0 / steps;  // backward
    auto [X, dX] = seed_asymptotic(tau, z0);
    State s{seed_scale * X, seed_scale * dX};
    traj.z_nodes[0] = z0;
    traj.X[0] = s.X;
    traj.dX[0] = s.dX;

    for (int n = 0; n < steps; ++n) {
        const double z = z0 + n * h;
        const State k1 = rhs(tau, z, s);
        const State k2 = rhs(tau, z + h / 2, axpy(s, h / 2, k1));
        const State k3 = rhs(tau, z + h / 2, axpy(s, h / 2, k2));
        const State k4 = rhs(tau, z + h, axpy(s, h, k3));
        s.X += (h / 6.0) * (k1.X + 2.0 * k2.X + 2.0 * k3.X + k4.X);
        s.dX += (h / 6.0) * (k1.dX + 2.0 * k2.dX + 2.0 * k3.dX + k4.dX);
        if (std::abs(s.X) > 1e300 || !std::isfinite(std::abs(s.X)))
            throw OverflowError("integrate_backward: |X| exceeded 1e300");
        const double zn = (n + 1 == steps) ? 0.0 : z0 + (n + 1) * h;
        traj.z_nodes[n + 1] = zn;
        traj.X[n + 1] = s.X;
        traj.dX[n + 1] = s.dX;
    }
    return traj;
}

cplx evans_mismatch(cplx tau, double z0, int steps) {
    return integrate_backward(tau, z0, steps).dX.back();
}

cplx grid_scan(double re_lo, double re_hi, double im_lo, double im_hi, int n,
               double z0, int steps) {
    if (im_lo >= 0.0 || im_hi > 0.0)
        throw std::invalid_argument("grid_scan: im_range must lie in the lower half-plane");
    if (n < 1) throw std::invalid_argument("grid_scan: n must be >= 1");
    cplx best(re_lo, im_lo);
    double best_abs = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double re = (n == 1) ? re_lo : re_lo + (re_hi - re_lo) * i / (n - 1);
        for (int j = 0; j < n; ++j) {
            const double im = (n == 1) ? im_lo : im_lo + (im_hi - im_lo) * j / (n - 1);
            const cplx tau(re, im);
            const double g = std::abs(evans_mismatch(tau, z0, steps));
            if (g < best_abs) {
                best_abs = g;
                best = tau;
            }
        }
    }
    return best;
}

TauRoot newton_tau(cplx tau0, double tol, int maxit, double z0, int steps) {
    if (tau0.imag() >= 0.0)
        throw std::invalid_argument("newton_tau: tau0 must lie in the open lower half-plane");
    cplx tau = tau0;
    std::ostringstream trace;
    trace.precision(12);
    for (int it = 0; it < maxit; ++it) {
        const cplx g = evans_mismatch(tau, z0, steps);
        trace << "\n  it " << it << ": tau = " << tau.real() << (tau.imag() < 0 ? " - " : " + ")
              << std::abs(tau.imag()) << "i  |G| = " << std::abs(g);
        if (std::abs(g) <= tol) return TauRoot{tau, std::abs(g), it, z0, steps};
        // G is holomorphic: one real direction determines the derivative.
        const double h = 1e-6 * (1.0 + std::abs(tau));
        const cplx gp = (evans_mismatch(tau + h, z0, steps) -
                         evans_mismatch(tau - h, z0, steps)) /
                        (2.0 * h);
        if (std::abs(gp) == 0.0)
            throw NonConvergenceError("newton_tau: vanishing derivative" + trace.str());
        const cplx next = tau - g / gp;
        if (next.imag() >= 0.0) {
            std::ostringstream msg;
            msg << "newton_tau: iterate escaped the lower half-plane at iteration " << it
                << trace.str();
            throw NonConvergenceError(msg.str());
        }
        tau = next;
    }
    const double g = std::abs(evans_mismatch(tau, z0, steps));
    if (g <= tol) return TauRoot{tau, g, maxit, z0, steps};
    throw NonConvergenceError("newton_tau: no convergence after max iterations, trace:" +
                              trace.str());
}

cplx integral_X(const ShootingTrajectory& traj) {
    // nodes run z0 -> 0; reverse for int_0^{z0}
    std::vector<cplx> f(traj.X.rbegin(), traj.X.rend());
    const double h = traj.z_nodes[0] / (traj.z_nodes.size() - 1);
    return simpson(f, h);
}

cplx integral_X_trapezoid(const ShootingTrajectory& traj) {
    std::vector<cplx> f(traj.X.rbegin(), traj.X.rend());
    const double h = traj.z_nodes[0] / (traj.z_nodes.size() - 1);
    return trapezoid(f, h);
}

}  // namespace prandtl
