#pragma once

#include <memory>
#include <vector>

#include "prandtl/base_flow.hpp"
#include "prandtl/numerics.hpp"
#include "prandtl/shear_layer.hpp"

namespace prandtl {

// Time-dependent base flow u_s(t,y) with y-derivatives up to order 3 and the
// mixed derivative d_t d_y u_s needed by the critical-point tracker.
class HeatFlow {
public:
    virtual ~HeatFlow() = default;

    // d^m/dy^m u_s(t,y), m = 0..3.
    virtual double dy(int m, double t, double y) const = 0;

    // d_t d_y u_s(t,y).  For flows evolving under the heat equation this
    // equals d^3_y u_s; for frozen flows it is identically zero.
    virtual double dt_dy(double t, double y) const = 0;

    virtual bool evolving() const = 0;

    // Critical point a(t) with d_y u_s(t,a(t)) = 0.
    virtual double critical_point(double t) const = 0;

    // Curvature d^2_y u_s(t,a(t)).
    double curvature(double t) const { return dy(2, t, critical_point(t)); }
};

// u_s(t,y) = 2 s^{-3/2} y e^{-y^2/s}, s = 1+4t: the exact half-line heat
// evolution of 2 y e^{-y^2} (odd extension).  a(t) = sqrt(s/2) in closed form.
class GaussianHeatFlow : public HeatFlow {
public:
    double dy(int m, double t, double y) const override;
    double dt_dy(double t, double y) const override { return dy(3, t, y); }
    bool evolving() const override { return true; }
    double critical_point(double t) const override;
};

// Time-frozen wrapper around a stationary BaseFlow.
class FrozenFlow : public HeatFlow {
public:
    explicit FrozenFlow(BaseFlow flow) : flow_(flow) {}
    double dy(int m, double t, double y) const override;
    double dt_dy(double, double) const override { return 0.0; }
    bool evolving() const override { return false; }
    double critical_point(double) const override { return flow_.a; }

private:
    BaseFlow flow_;
};

// Frozen flow that is exactly quadratic about its critical point,
// u_s(y) = c2 (y-a)^2 / 2: both Taylor-remainder terms of the residual
// vanish identically for this flow.
class FrozenQuadraticFlow : public HeatFlow {
public:
    FrozenQuadraticFlow(double a, double c2) : a_(a), c2_(c2) {}
    double dy(int m, double t, double y) const override;
    double dt_dy(double, double) const override { return 0.0; }
    bool evolving() const override { return false; }
    double critical_point(double) const override { return a_; }

private:
    double a_;
    double c2_;
};

// Normalized shear-layer corrector V(z) with one-sided limits at z = 0,
// evaluated from the two branches of a ShearLayerProfile (cubic splines on
// the positive coordinate; the left branch is reached by reflection).
// V and its first two derivatives; zero outside |z| > z0.
class LayerProfile {
public:
    explicit LayerProfile(const ShearLayerProfile& profile);

    cplx V(double z, int der = 0) const;
    cplx tau() const { return tau_; }
    double z0() const { return z0_; }

private:
    CubicSpline right_;
    CubicSpline left_;  // V(-x) for x >= 0
    cplx tau_;
    double z0_;
};

struct QuasimodeFields {
    double epsilon = 0.0;
    double t = 0.0;
    cplx omega;                // omega(eps,t); phase factors are NOT baked in
    double cutoff_radius = 0.3;
    std::vector<double> y;
    std::vector<cplx> v_reg;
    std::vector<cplx> v_sl;
    std::vector<cplx> u_eps;   // i d_y(v_reg + v_sl), phase stripped
};

struct ResidualReport {
    double epsilon = 0.0;
    double sigma0 = 0.0;
    std::vector<double> times;
    // Weighted sup norm of the displayed residual block with the modulus of
    // the oscillatory phase restored (|e^{i eps^{-1} int omega}|).
    std::vector<double> residual_norm;
    // residual_norm * e^{-sigma0 t / sqrt(eps)}: the (expo2) envelope.
    std::vector<double> envelope_ratio;
    // Phase-stripped norms, reported separately: displayed block, cutoff
    // (phi-derivative) block, and the velocity profile U_eps.
    std::vector<double> block_norm;
    std::vector<double> cutoff_norm;
    std::vector<double> u_norm;
    // u_norm with phase restored and the e^{sigma0 t/sqrt(eps)} growth
    // divided out: the (expo1) sandwich constants.
    std::vector<double> u_ratio;
};

// Smooth cutoff: identically 1 on |s| <= 0.15, identically 0 on |s| >= 0.3.
double cutoff_phi(double s);

// RK4 on a'(t) = -d_t d_y u_s(t,a) / d^2_y u_s(t,a), a(0) from the flow.
// Throws NonConvergenceError when |d^2_y u_s(t,a(t))| falls below the floor.
double track_critical_point(const HeatFlow& flow, double t, int nsteps = 256,
                            double curvature_floor = 1e-6);

// omega(eps,t) = -u_s(t,a(t)) + sqrt(eps)/sqrt(2) |d^2_y u_s(t,a(t))|^{1/2} tau.
cplx omega_eps(const HeatFlow& flow, cplx tau, double epsilon, double t);

// sigma0 = |d^2_y u_s(0,a(0))|^{1/2} |Im tau| / sqrt(2).
double sigma0_of(const HeatFlow& flow, cplx tau);

// exp of the phase modulus exponent: eps^{-1} int_0^t (-Im omega(eps,s)) ds,
// evaluated by composite Simpson (closed form for the Gaussian flow agrees
// to machine precision).
double phase_exponent(const HeatFlow& flow, cplx tau, double epsilon, double t);

// Union grid on [0,10]: a uniform backbone plus a dense band around a(t)
// sized so the layer width (2 eps)^{1/4} |c2|^{-1/4} carries >= 16 nodes.
std::vector<double> quasimode_grid(const HeatFlow& flow, double epsilon, double t);

// Weighted sup norm max exp(alpha_w y) |v(y)| on the given grid.
double weighted_sup(const std::vector<double>& y, const std::vector<double>& absval,
                    double alpha_w = 0.5);

// Assemble the fields on y_grid.  Throws std::invalid_argument when the grid
// under-resolves the layer (fewer than 16 nodes per layer width).
QuasimodeFields build_fields(const HeatFlow& flow, const LayerProfile& profile,
                             double epsilon, double t,
                             const std::vector<double>& y_grid);

// Evaluate the displayed residual block and the cutoff block at each time
// sample and report the growth envelopes.
ResidualReport residual(const HeatFlow& flow, const LayerProfile& profile,
                        double epsilon, const std::vector<double>& t_samples);

void export_envelope(const std::string& path, const std::vector<ResidualReport>& reports);

}  // namespace prandtl
