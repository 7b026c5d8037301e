#include "prandtl/shear_layer.hpp"

#include <cmath>
#include <stdexcept>

namespace prandtl {

HeteroclinicProfile build_heteroclinic(const TauRoot& root, const ShootingTrajectory& traj) {
    const std::size_t n = traj.z_nodes.size() - 1;  // intervals, z0 -> 0
    const double z0 = traj.z_nodes.front();
    const double h = z0 / n;

    // increasing order 0..z0
    std::vector<cplx> X(traj.X.rbegin(), traj.X.rend());
    // W_-(z) = int_z^{z0} X = I_total - int_0^z X
    const std::vector<cplx> cum = cumulative_simpson(X, h);
    const cplx W0 = cum.back();  // W_-(0) = int_0^{z0} X
    const double floor = 1e-3 * z0;
    double maxX = 0.0;
    for (const auto& x : X) maxX = std::max(maxX, std::abs(x));
    if (std::abs(W0) < floor * maxX)
        throw SCViolationError("build_heteroclinic: |int X| below floor (SC violated)");

    HeteroclinicProfile out;
    out.tau = root.tau;
    out.z_nodes.resize(2 * n + 1);
    out.W.resize(2 * n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        const cplx Wm = W0 - cum[k];  // W_-(z_k), z_k = k h
        const cplx right = 1.0 - Wm / (2.0 * W0);
        const cplx left = Wm / (2.0 * W0);
        out.z_nodes[n + k] = k * h;
        out.W[n + k] = right;
        if (k > 0) {
            out.z_nodes[n - k] = -static_cast<double>(k) * h;
            out.W[n - k] = left;
        }
    }
    return out;
}

ShearLayerProfile build_V(const HeteroclinicProfile& profile) {
    const std::size_t total = profile.z_nodes.size();  // 2n+1
    const std::size_t n = (total - 1) / 2;
    const double h = profile.z_nodes[n + 1] - profile.z_nodes[n];
    const cplx tau = profile.tau;

    ShearLayerProfile out;
    out.tau = tau;
    out.curvature = -2.0;
    out.z_nodes.resize(2 * n + 2);
    out.V.resize(2 * n + 2);
    // left branch including the 0- limit
    for (std::size_t k = 0; k <= n; ++k) {
        const double z = profile.z_nodes[k];
        out.z_nodes[k] = z;
        out.V[k] = (tau - z * z) * profile.W[k];
    }
    // right branch including the 0+ limit
    for (std::size_t k = n; k <= 2 * n; ++k) {
        const double z = profile.z_nodes[k];
        out.z_nodes[k + 1] = z;
        out.V[k + 1] = (tau - z * z) * (profile.W[k] - 1.0);
    }

    // jump extraction from one-sided differences at the puncture
    const cplx* R = &out.V[n + 1];  // right limits at 0, h, 2h, 3h
    std::vector<cplx> L(4);         // left limits at 0, -h, -2h, -3h
    for (int j = 0; j < 4; ++j) L[j] = out.V[n - j];
    const cplx d1r = (-3.0 * R[0] + 4.0 * R[1] - R[2]) / (2.0 * h);
    const cplx d1l = -(-3.0 * L[0] + 4.0 * L[1] - L[2]) / (2.0 * h);  // d/dz flips sign
    const cplx d2r = (2.0 * R[0] - 5.0 * R[1] + 4.0 * R[2] - R[3]) / (h * h);
    const cplx d2l = (2.0 * L[0] - 5.0 * L[1] + 4.0 * L[2] - L[3]) / (h * h);
    out.jumpV = R[0] - L[0];
    out.jumpV1 = d1r - d1l;
    out.jumpV2 = d2r - d2l;
    return out;
}

ShearLayerProfile rescale_physical(const ShearLayerProfile& profile, cplx tau, double curvature) {
    if (curvature == 0.0)
        throw std::invalid_argument("rescale_physical: degenerate critical point (curvature 0)");

    ShearLayerProfile work = profile;
    cplx t = tau;
    if (curvature > 0.0) {
        // sign rule: tau := -conj(tau), W := conj(W); rebuild V from W
        const cplx told = t;
        t = -std::conj(t);
        for (std::size_t k = 0; k < work.V.size(); ++k) {
            const double z = work.z_nodes[k];
            const bool right = k >= work.V.size() / 2;  // 0+ branch half
            const cplx W = work.V[k] / (told - z * z) + (right ? 1.0 : 0.0);
            work.V[k] = (t - z * z) * std::conj(W) - (right ? (t - z * z) : 0.0);
        }
    }
    const double ac = std::abs(curvature);
    const double amp = std::sqrt(ac) / std::sqrt(2.0);
    const double zscale = std::pow(2.0, 0.25) * std::pow(ac, -0.25);

    ShearLayerProfile out;
    out.tau = amp * t;
    out.curvature = curvature;
    out.z_nodes.resize(work.z_nodes.size());
    out.V.resize(work.V.size());
    for (std::size_t k = 0; k < work.z_nodes.size(); ++k) {
        out.z_nodes[k] = zscale * work.z_nodes[k];
        out.V[k] = amp * work.V[k];
    }
    out.jumpV = amp * work.jumpV;
    out.jumpV1 = amp / zscale * work.jumpV1;
    out.jumpV2 = amp / (zscale * zscale) * work.jumpV2;
    if (curvature > 0.0) {
        // jumps were computed for the pre-rule V; recompute from the limits
        const std::size_t n = work.V.size() / 2 - 1;
        const double h = out.z_nodes[n + 2] - out.z_nodes[n + 1];
        const cplx* R = &out.V[n + 1];
        std::vector<cplx> L(4);
        for (int j = 0; j < 4; ++j) L[j] = out.V[n - j];
        out.jumpV = R[0] - L[0];
        out.jumpV1 = (-3.0 * R[0] + 4.0 * R[1] - R[2]) / (2.0 * h) +
                     (-3.0 * L[0] + 4.0 * L[1] - L[2]) / (2.0 * h);
        out.jumpV2 = (2.0 * R[0] - 5.0 * R[1] + 4.0 * R[2] - R[3]) / (h * h) -
                     (2.0 * L[0] - 5.0 * L[1] + 4.0 * L[2] - L[3]) / (h * h);
    }
    return out;
}

DecayFit decay_rate(const std::vector<double>& z, const std::vector<double>& absval) {
    if (z.size() != absval.size()) throw std::invalid_argument("decay_rate: size mismatch");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (absval[i] > 1e-300) {
            x.push_back(z[i] * z[i]);
            y.push_back(std::log(absval[i]));
        }
    }
    if (x.empty()) throw std::invalid_argument("decay_rate: all samples at the floating-point floor");
    if (x.size() < 20) throw std::invalid_argument("decay_rate: need at least 20 positive samples");
    const LinearFit fit = linear_fit(x, y);
    DecayFit out;
    out.rate = -fit.slope;
    out.r2 = fit.r2;
    out.gaussian_ok = fit.r2 >= 0.99;
    return out;
}

void export_profile(const std::string& path, const HeteroclinicProfile& het,
                    const ShearLayerProfile& slp) {
    CsvWriter csv(path, {"z", "re_w", "im_w", "re_v", "im_v"});
    const std::size_t n = (het.z_nodes.size() - 1) / 2;
    for (std::size_t k = 0; k < slp.z_nodes.size(); ++k) {
        // W is continuous: duplicate its 0-node value on both sides of the puncture
        const std::size_t wk = (k <= n) ? k : k - 1;
        csv.row({slp.z_nodes[k], het.W[wk].real(), het.W[wk].imag(), slp.V[k].real(),
                 slp.V[k].imag()});
    }
}

}  // namespace prandtl
