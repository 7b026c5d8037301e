#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "prandtl/complexode.hpp"

using prandtl::cplx;
using prandtl::evans_mismatch;
using prandtl::grid_scan;
using prandtl::integral_X;
using prandtl::integral_X_trapezoid;
using prandtl::integrate_backward;
using prandtl::newton_tau;
using prandtl::seed_asymptotic;
using prandtl::ShootingTrajectory;
using prandtl::TauRoot;

namespace {

const cplx kTauRef(-0.70710678118654752, -0.70710678118654752);

const TauRoot& shooting_root() {
    static const TauRoot root = newton_tau(cplx(-0.7, -0.7), 1e-6, 40);
    return root;
}

}  // namespace

TEST_CASE("asymptotic seed is unit-normalized and decaying") {
    const auto [X, dX] = seed_asymptotic(kTauRef, 6.0);
    CHECK(std::abs(X) == doctest::Approx(1.0).epsilon(1e-14));
    // The logarithmic derivative is dominated by -lambda z at large z, so the
    // branch decays toward +infinity.
    CHECK(std::real(dX / X) < 0.0);
    CHECK(std::abs(dX / X + prandtl::kLambda * 6.0) < 1.0);
}

TEST_CASE("RK4 shows fourth-order self-convergence at X(0)") {
    const cplx tau(0.0, -2.0);
    const cplx x1 = integrate_backward(tau, 6.0, 1500).X.back();
    const cplx x2 = integrate_backward(tau, 6.0, 3000).X.back();
    const cplx x3 = integrate_backward(tau, 6.0, 6000).X.back();
    const double ratio = std::abs(x1 - x2) / std::abs(x2 - x3);
    CHECK(ratio >= 12.0);
    CHECK(ratio <= 20.0);
}

TEST_CASE("real tau puts tau - z^2 on the integration path") {
    CHECK_THROWS_AS(integrate_backward(cplx(4.0, 0.0), 6.0, 6000),
                    prandtl::SingularCoefficientError);
}

TEST_CASE("runaway growth is reported, not silently returned") {
    CHECK_THROWS_AS(integrate_backward(cplx(-2.0, -2.0), 50.0, 50000),
                    prandtl::OverflowError);
}

TEST_CASE("Newton converges to the Evans root on the diagonal") {
    const TauRoot& root = shooting_root();
    CHECK(std::abs(root.tau - kTauRef) < 1e-6);
    CHECK(root.residual <= 1e-6);
    CHECK(root.iterations <= 40);
    // The root sits on the line Re tau = Im tau.
    CHECK(std::abs(std::real(root.tau) - std::imag(root.tau)) < 1e-9);
}

TEST_CASE("a seed across the basin lands on the same root or says so") {
    try {
        const TauRoot other = newton_tau(cplx(-0.2, -1.5), 1e-6, 40);
        CHECK(std::abs(other.tau - shooting_root().tau) < 1e-4);
    } catch (const prandtl::NonConvergenceError&) {
        // An explicit failure is acceptable; a silent wrong answer is not.
    }
}

TEST_CASE("G satisfies the Cauchy-Riemann equations numerically") {
    const cplx tau(-1.0, -1.0);
    const double h = 1e-4;
    const cplx d_re =
        (evans_mismatch(tau + h, 6.0, 6000) - evans_mismatch(tau - h, 6.0, 6000)) / (2.0 * h);
    const cplx d_im = (evans_mismatch(tau + cplx(0.0, h), 6.0, 6000) -
                       evans_mismatch(tau - cplx(0.0, h), 6.0, 6000)) /
                      (2.0 * h);
    const double cr_residual = std::abs(d_re - cplx(0.0, -1.0) * d_im) / std::abs(d_re);
    CHECK(cr_residual < 1e-5);
}

TEST_CASE("the root does not move when the truncation point does") {
    const TauRoot& root6 = shooting_root();
    const double tol8 = 1e-10 * std::abs(evans_mismatch(cplx(-0.7, -0.7), 8.0, 8000));
    const TauRoot root8 = newton_tau(cplx(-0.7, -0.7), tol8, 40, 8.0, 8000);
    CHECK(std::abs(root8.tau - root6.tau) < 1e-9);
}

TEST_CASE("the solver is exactly linear in the seed scale") {
    const cplx tau = shooting_root().tau;
    const cplx c(0.3, -1.7);
    const ShootingTrajectory base = integrate_backward(tau, 6.0, 6000);
    const ShootingTrajectory scaled = integrate_backward(tau, 6.0, 6000, c);
    double dev_x = 0.0, peak_x = 0.0, dev_dx = 0.0, peak_dx = 0.0;
    for (std::size_t i = 0; i < base.X.size(); ++i) {
        dev_x = std::max(dev_x, std::abs(scaled.X[i] - c * base.X[i]));
        peak_x = std::max(peak_x, std::abs(c * base.X[i]));
        dev_dx = std::max(dev_dx, std::abs(scaled.dX[i] - c * base.dX[i]));
        peak_dx = std::max(peak_dx, std::abs(c * base.dX[i]));
    }
    CHECK(dev_x / peak_x < 1e-12);
    CHECK(dev_dx / peak_dx < 1e-12);
}

TEST_CASE("Simpson and trapezoid quadratures of X agree") {
    const ShootingTrajectory traj = integrate_backward(shooting_root().tau, 6.0, 6000);
    const cplx s = integral_X(traj);
    const cplx t = integral_X_trapezoid(traj);
    CHECK(std::abs(s) > 0.0);
    CHECK(std::abs(s - t) / std::abs(s) < 1e-4);
}

TEST_CASE("the lattice scan seeds Newton inside the basin") {
    const cplx seed = grid_scan(-2.0, 0.0, -2.0, -0.1, 8, 6.0, 1500);
    const TauRoot root = newton_tau(seed, 1e-4, 40);
    CHECK(std::abs(root.tau - kTauRef) < 1e-4);
}

TEST_CASE("|G| magnitudes are reproducible regression values") {
    CHECK(std::abs(evans_mismatch(cplx(-0.7, -0.7), 6.0, 6000)) ==
          doctest::Approx(8169211.976).epsilon(1e-3));
    const ShootingTrajectory traj = integrate_backward(shooting_root().tau, 6.0, 6000);
    CHECK(std::abs(traj.X.back()) == doctest::Approx(454304305.43).epsilon(1e-3));
    CHECK(std::abs(integral_X(traj)) == doctest::Approx(284693004.38).epsilon(1e-3));
}
