#pragma once

#include <string>
#include <vector>

#include "prandtl/complexode.hpp"
#include "prandtl/numerics.hpp"

namespace prandtl {

// Raised when |int X| collapses, i.e. no heteroclinic connection exists at
// the supplied root: the spectral condition alarm.
struct SCViolationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Heteroclinic W on the mirrored shooting grid: W -> 0 at -inf, 1 at +inf,
// W(0) = 1/2 by the two-branch even-reflection construction.
struct HeteroclinicProfile {
    std::vector<double> z_nodes;  // symmetric, -z0 .. 0 .. z0 (single 0 node)
    std::vector<cplx> W;
    cplx tau;
};

// Shear-layer corrector V = (tau - z^2) W - 1_{z>0} (tau - z^2) on a grid
// punctured at 0: the two 0-entries hold the left and right limits.
struct ShearLayerProfile {
    std::vector<double> z_nodes;  // -z0 .. -h, 0 (left limit), 0 (right limit), h .. z0
    std::vector<cplx> V;
    cplx jumpV, jumpV1, jumpV2;  // [V], [V'], [V''] at 0
    double curvature = -2.0;     // -2 in normalized variables
    cplx tau;
};

struct DecayFit {
    double rate = 0.0;  // r in |v| ~ C exp(-r z^2)
    double r2 = 0.0;
    bool gaussian_ok = false;  // fit quality flag (r2 >= 0.99)
};

HeteroclinicProfile build_heteroclinic(const TauRoot& root, const ShootingTrajectory& traj);

ShearLayerProfile build_V(const HeteroclinicProfile& profile);

// Physical shear-layer variables for a flow with curvature U''(a):
// tau_phys = |c|^{1/2}/sqrt(2) tau, z_phys = 2^{1/4} |c|^{-1/4} z, and the
// amplitude scales with tau so the jump triple becomes (-tau_phys, 0, |c|)
// -- equal to (-tau_phys, 0, -c) in the concave case c < 0 of the theory.
// For c > 0 the sign rule tau := -conj(tau), W := conj(W) is applied first;
// it preserves Im tau_phys < 0 and the normalized curvature identity, so the
// second jump keeps magnitude |c|.
ShearLayerProfile rescale_physical(const ShearLayerProfile& profile, cplx tau, double curvature);

// Least-squares fit of log|value| against -r z^2.
DecayFit decay_rate(const std::vector<double>& z, const std::vector<double>& absval);

// CSV export (z, Re W, Im W, Re V, Im V) on the punctured grid.
void export_profile(const std::string& path, const HeteroclinicProfile& het,
                    const ShearLayerProfile& slp);

}  // namespace prandtl
