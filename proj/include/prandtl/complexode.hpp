#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "prandtl/numerics.hpp"

namespace prandtl {

// Decay factor of the recessive branch at +infinity: lambda = (1-i)/sqrt(2).
inline const cplx kLambda{0.70710678118654752, -0.70710678118654752};

struct SingularCoefficientError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct OverflowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Root of the Evans mismatch G(tau) = dX(0) in the lower half-plane.
struct TauRoot {
    cplx tau;
    double residual = 0.0;  // |G| at convergence
    int iterations = 0;
    double z0 = 6.0;
    int steps = 6000;
};

// Backward-integrated decaying branch, stored from z0 down to 0.
struct ShootingTrajectory {
    cplx tau;
    std::vector<double> z_nodes;  // strictly decreasing, last node 0
    std::vector<cplx> X;
    std::vector<cplx> dX;
};

// Unit-normalized asymptotic seed at z0: X = 1 and dX = logarithmic derivative
// of z^{-i tau/(2 lambda) - 7/2} exp(-lambda z^2 / 2).
std::pair<cplx, cplx> seed_asymptotic(cplx tau, double z0);

// Classic RK4 on i(tau - z^2) X'' - 6 i z X' + ((tau - z^2)^2 - 6i) X = 0 from
// z0 down to 0 with fixed step.  The seed may be rescaled by any complex
// factor; the solver is linear, so X and dX scale with it exactly.
ShootingTrajectory integrate_backward(cplx tau, double z0, int steps,
                                      cplx seed_scale = cplx(1.0, 0.0));

// G(tau) := dX at z = 0.
cplx evans_mismatch(cplx tau, double z0, int steps);

// Minimizer of |G| over an n x n lattice; im_range must lie below the real
// axis.
cplx grid_scan(double re_lo, double re_hi, double im_lo, double im_hi, int n,
               double z0 = 6.0, int steps = 6000);

// Newton iteration on G with a central-difference derivative in one real
// direction (G is holomorphic); tol is an absolute bound on |G|.
TauRoot newton_tau(cplx tau0, double tol, int maxit, double z0 = 6.0, int steps = 6000);

// Composite Simpson of X over the stored nodes, as int_0^{z0} X dz.
cplx integral_X(const ShootingTrajectory& traj);

// Same quadrature with the trapezoid rule (cross-check only).
cplx integral_X_trapezoid(const ShootingTrajectory& traj);

}  // namespace prandtl
