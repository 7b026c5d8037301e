#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <vector>

#include "prandtl/complexode.hpp"
#include "prandtl/quasimode.hpp"
#include "prandtl/shear_layer.hpp"

using prandtl::build_fields;
using prandtl::build_heteroclinic;
using prandtl::build_V;
using prandtl::cplx;
using prandtl::cutoff_phi;
using prandtl::FrozenFlow;
using prandtl::FrozenQuadraticFlow;
using prandtl::GaussianHeatFlow;
using prandtl::integrate_backward;
using prandtl::LayerProfile;
using prandtl::newton_tau;
using prandtl::omega_eps;
using prandtl::phase_exponent;
using prandtl::quasimode_grid;
using prandtl::QuasimodeFields;
using prandtl::residual;
using prandtl::ResidualReport;
using prandtl::ShearLayerProfile;
using prandtl::sigma0_of;
using prandtl::TauRoot;
using prandtl::track_critical_point;
using prandtl::weighted_sup;

namespace {

const TauRoot& root() {
    static const TauRoot r = newton_tau(cplx(-0.7, -0.7), 1e-6, 40);
    return r;
}

const LayerProfile& layer() {
    static const LayerProfile lp = [] {
        const auto traj = integrate_backward(root().tau, 6.0, 6000);
        const ShearLayerProfile slp = build_V(build_heteroclinic(root(), traj));
        return LayerProfile(slp);
    }();
    return lp;
}

const GaussianHeatFlow& gauss_flow() {
    static const GaussianHeatFlow f;
    return f;
}

}  // namespace

TEST_CASE("the cutoff is a symmetric plateau") {
    for (double s : {0.0, 0.1, 0.149, -0.12}) CHECK(cutoff_phi(s) == 1.0);
    for (double s : {0.31, 0.5, -0.4}) CHECK(cutoff_phi(s) == 0.0);
    CHECK(cutoff_phi(0.225) == doctest::Approx(0.5).epsilon(1e-12));
    double prev = 1.0;
    for (double s = 0.16; s < 0.295; s += 0.005) {
        const double v = cutoff_phi(s);
        CHECK(v == cutoff_phi(-s));
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("the tracker follows the spreading Gaussian critical point") {
    const auto exact = [](double t) { return std::sqrt((1.0 + 4.0 * t) / 2.0); };
    CHECK(std::abs(track_critical_point(gauss_flow(), 0.5) - exact(0.5)) < 1e-8);
    CHECK(std::abs(track_critical_point(gauss_flow(), 2.5) - exact(2.5)) < 1e-4);
    CHECK(track_critical_point(gauss_flow(), 0.0) == exact(0.0));
    // Initial drift rate of a(t) is -U_s'''(a)/U_s''(a) = sqrt(2) at t = 0.
    const double da = (track_critical_point(gauss_flow(), 1e-4) - exact(0.0)) / 1e-4;
    CHECK(std::abs(da - std::sqrt(2.0)) < 3e-3);
    // A frozen flow does not move.
    const FrozenFlow frozen(prandtl::gaussian_shear_flow());
    CHECK(track_critical_point(frozen, 2.0) == frozen.critical_point(0.0));
}

TEST_CASE("the tracker guards against degenerate curvature") {
    const FrozenQuadraticFlow flat(0.5, 5e-7);
    CHECK_THROWS_AS(track_critical_point(flat, 1.0), prandtl::NonConvergenceError);
    CHECK_THROWS_AS(track_critical_point(gauss_flow(), 1.0, 0), std::invalid_argument);
}

TEST_CASE("omega splits into transport and layer parts") {
    const cplx tau = root().tau;
    const double eps = 1e-6;
    const double usa = gauss_flow().dy(0, 0.0, gauss_flow().critical_point(0.0));
    const double kappa = std::sqrt(-gauss_flow().curvature(0.0));
    const cplx expected = -usa + std::sqrt(eps) / std::sqrt(2.0) * kappa * tau;
    CHECK(std::abs(omega_eps(gauss_flow(), tau, eps, 0.0) - expected) < 1e-15);
    CHECK(std::imag(omega_eps(gauss_flow(), tau, eps, 0.0)) < 0.0);
    CHECK_THROWS_AS(omega_eps(gauss_flow(), tau, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(omega_eps(gauss_flow(), tau, 1.5, 0.0), std::invalid_argument);
}

TEST_CASE("sigma0 matches the frozen growth constant") {
    const double s0 = sigma0_of(gauss_flow(), root().tau);
    CHECK(std::abs(s0 - 0.9261554) < 1e-4);
    CHECK(std::abs(s0 - 0.9247) < 0.01);
}

TEST_CASE("the phase exponent integrates -Im omega / eps") {
    const cplx tau = root().tau;
    const double eps = 1e-4;
    CHECK(phase_exponent(gauss_flow(), tau, eps, 0.0) == 0.0);
    // Closed form for the Gaussian flow: kappa(0) sqrt(s) with s = 1+4t gives
    // |Im tau| ln(1+4t) / (4 sqrt(eps)) after the curvature substitution.
    const double t = std::sqrt(eps);
    const double s0 = sigma0_of(gauss_flow(), tau);
    const double closed = s0 * std::log(1.0 + 4.0 * t) / (4.0 * t) * t / std::sqrt(eps);
    CHECK(std::abs(phase_exponent(gauss_flow(), tau, eps, t) - closed) / closed < 2e-5);
    // For a frozen flow the integral is exactly sigma0 t / sqrt(eps).
    const FrozenFlow frozen(prandtl::gaussian_shear_flow());
    const double sf = sigma0_of(frozen, tau);
    const double pf = phase_exponent(frozen, tau, eps, t);
    CHECK(std::abs(pf - sf * t / std::sqrt(eps)) / pf < 1e-12);
}

TEST_CASE("the union grid resolves the layer at every epsilon") {
    for (double eps : {1e-3, 1e-6}) {
        const std::vector<double> y = quasimode_grid(gauss_flow(), eps, 0.0);
        REQUIRE(y.size() >= 2001);
        CHECK(y.front() == 0.0);
        CHECK(y.back() == 10.0);
        for (std::size_t i = 0; i + 1 < y.size(); ++i) CHECK(y[i] < y[i + 1]);
        const double a = gauss_flow().critical_point(0.0);
        const double w = std::pow(2.0 * eps, 0.25) / std::pow(-gauss_flow().curvature(0.0), 0.25);
        std::size_t inside = 0;
        for (double yy : y)
            if (std::abs(yy - a) <= 0.5 * w) ++inside;
        CHECK(inside >= 16);
    }
}

TEST_CASE("the spline corrector keeps the jump and compact support") {
    // One-sided limits at 0 differ by [V] = -tau.
    const cplx right = layer().V(1e-300, 0);
    const cplx left = layer().V(-1e-300, 0);
    CHECK(std::abs((right - left) + layer().tau()) < 1e-10);
    CHECK(layer().V(layer().z0() + 1.0, 0) == cplx(0.0, 0.0));
    CHECK(layer().V(-layer().z0() - 2.0, 1) == cplx(0.0, 0.0));
    CHECK_THROWS_AS(layer().V(1.0, 3), std::invalid_argument);
}

TEST_CASE("a malformed layer profile is rejected") {
    ShearLayerProfile bad;
    bad.z_nodes = {-1.0, 0.0, 1.0};  // no punctured double zero
    bad.V = {cplx(1.0, 0.0), cplx(2.0, 0.0), cplx(3.0, 0.0)};
    CHECK_THROWS_AS((void)LayerProfile{bad}, std::invalid_argument);
}

TEST_CASE("field supports: v_reg above the layer, v_sl inside it") {
    const double eps = 1e-4;
    const std::vector<double> y = quasimode_grid(gauss_flow(), eps, 0.0);
    const QuasimodeFields f = build_fields(gauss_flow(), layer(), eps, 0.0, y);
    CHECK(f.omega == omega_eps(gauss_flow(), root().tau, eps, 0.0));
    const double a = gauss_flow().critical_point(0.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] < a) CHECK(f.v_reg[i] == cplx(0.0, 0.0));
        if (std::abs(y[i] - a) > 0.31) CHECK(f.v_sl[i] == cplx(0.0, 0.0));
    }
}

TEST_CASE("under-resolved grids are rejected") {
    std::vector<double> coarse;
    for (double yy = 0.0; yy <= 10.0 + 1e-12; yy += 0.1) coarse.push_back(yy);
    CHECK_THROWS_AS(build_fields(gauss_flow(), layer(), 1e-6, 0.0, coarse),
                    std::invalid_argument);
}

TEST_CASE("u_eps approaches the interior singular limit as eps -> 0") {
    // Against i H(y-a) u_s'(y): the eps-independent limit profile.
    auto limit_error = [&](double eps) {
        const std::vector<double> y = quasimode_grid(gauss_flow(), eps, 0.0);
        const QuasimodeFields f = build_fields(gauss_flow(), layer(), eps, 0.0, y);
        const double a = gauss_flow().critical_point(0.0);
        const double w = std::pow(2.0 * eps, 0.25) / std::pow(-gauss_flow().curvature(0.0), 0.25);
        double worst = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (std::abs(y[i] - a) <= 5.0 * w) continue;  // skip the layer
            const cplx lim =
                y[i] > a ? cplx(0.0, gauss_flow().dy(1, 0.0, y[i])) : cplx(0.0, 0.0);
            worst = std::max(worst, std::abs(f.u_eps[i] - lim));
        }
        return worst;
    };
    const double e6 = limit_error(1e-6);
    const double e7 = limit_error(1e-7);
    CHECK(e6 < 1e-3);
    CHECK(e7 < e6);
}

TEST_CASE("the rescaled layer field collapses onto V") {
    // v_sl(y) at two epsilons, both mapped to the layer variable z, agree.
    const double a = gauss_flow().critical_point(0.0);
    const double kappa = std::sqrt(-gauss_flow().curvature(0.0));
    auto sample = [&](double eps, double z) {
        const std::vector<double> y = quasimode_grid(gauss_flow(), eps, 0.0);
        const QuasimodeFields f = build_fields(gauss_flow(), layer(), eps, 0.0, y);
        const double w = std::pow(2.0 * eps, 0.25) / std::sqrt(kappa);
        const double target = a + z * w;
        // nearest grid point
        std::size_t best = 0;
        for (std::size_t i = 0; i < y.size(); ++i)
            if (std::abs(y[i] - target) < std::abs(y[best] - target)) best = i;
        const double ca = std::sqrt(eps) * kappa / std::sqrt(2.0);
        return f.v_sl[best] / ca;
    };
    for (double z : {-1.0, 0.5, 1.5}) {
        const cplx a5 = sample(1e-5, z);
        const cplx a6 = sample(1e-6, z);
        CHECK(std::abs(a5 - a6) / std::abs(a6) < 1e-2);
    }
}

TEST_CASE("residual envelopes stay sandwiched across three decades") {
    std::vector<ResidualReport> reports;
    double u_lo = 1e300, u_hi = 0.0, e_lo = 1e300, e_hi = 0.0;
    for (double eps : {1e-3, 1e-4, 1e-5}) {
        std::vector<double> ts(6);
        for (int j = 0; j < 6; ++j) ts[j] = std::sqrt(eps) * j / 5.0;
        const ResidualReport rep = residual(gauss_flow(), layer(), eps, ts);
        CHECK(std::abs(rep.sigma0 - 0.9247) < 0.01);
        for (double u : rep.u_ratio) {
            REQUIRE(std::isfinite(u));
            REQUIRE(u > 0.0);
            u_lo = std::min(u_lo, u);
            u_hi = std::max(u_hi, u);
        }
        for (double e : rep.envelope_ratio) {
            REQUIRE(std::isfinite(e));
            REQUIRE(e > 0.0);
            e_lo = std::min(e_lo, e);
            e_hi = std::max(e_hi, e);
        }
        reports.push_back(rep);
    }
    CHECK(u_hi / u_lo <= 2.0);
    CHECK(e_hi / e_lo <= 2.0);
}

TEST_CASE("the cutoff block gains a full power of the layer width") {
    // cutoff_norm at t = 0 relative to the main block, ratio over successive
    // decades: deep in the asymptotic regime it beats the cube of the width
    // ratio; the first decade pair is still pre-asymptotic.
    std::vector<double> ratios;
    for (double eps : {1e-3, 1e-4, 1e-5, 1e-6}) {
        const ResidualReport rep = residual(gauss_flow(), layer(), eps, {0.0});
        ratios.push_back(rep.cutoff_norm[0] / rep.block_norm[0]);
    }
    CHECK(ratios[1] < ratios[0]);
    CHECK(ratios[2] < ratios[1]);
    CHECK(ratios[3] < ratios[2]);
    CHECK(ratios[3] / ratios[2] <= 1e-3);
}

TEST_CASE("a quadratic frozen flow kills the Taylor remainders exactly") {
    const FrozenQuadraticFlow quad(0.7071067811865475, -3.4310527);
    for (double t : {0.0, 5e-3}) {
        const ResidualReport rep = residual(quad, layer(), 1e-4, {t});
        CHECK(rep.block_norm[0] <= 1e-12);
        CHECK(rep.cutoff_norm[0] > 1.0);
    }
}

TEST_CASE("weighted_sup is the plain weighted maximum") {
    const std::vector<double> y{0.0, 2.0, 4.0};
    const std::vector<double> v{0.5, 1.0, 0.1};
    CHECK(weighted_sup(y, v) ==
          doctest::Approx(std::max({0.5, std::exp(1.0), 0.1 * std::exp(2.0)})).epsilon(1e-14));
}
