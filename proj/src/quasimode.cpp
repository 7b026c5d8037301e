#include "prandtl/quasimode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "prandtl/complexode.hpp"
#include "prandtl/heat_halfspace.hpp"

namespace prandtl {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

double bump(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

}  // namespace

double cutoff_phi(double s) {
    const double t = (0.3 - std::fabs(s)) / 0.15;
    const double a = bump(t);
    const double b = bump(1.0 - t);
    return a / (a + b);
}

namespace {

// phi and its first three derivatives by dense central differences on the
// closed form; phi is C-infinity so h = 1e-4 gives ~1e-8 relative accuracy.
void phi_derivs(double s, double out[4]) {
    const double h = 1e-4;
    const double fm2 = cutoff_phi(s - 2 * h);
    const double fm1 = cutoff_phi(s - h);
    const double f0 = cutoff_phi(s);
    const double fp1 = cutoff_phi(s + h);
    const double fp2 = cutoff_phi(s + 2 * h);
    out[0] = f0;
    out[1] = (fp1 - fm1) / (2 * h);
    out[2] = (fp1 - 2 * f0 + fm1) / (h * h);
    out[3] = (fp2 - 2 * fp1 + 2 * fm1 - fm2) / (2 * h * h * h);
}

struct Frame {
    double a = 0.0;
    double c2 = 0.0;
    double kappa = 0.0;
    cplx s_tau;
    double ca = 0.0;  // amplitude sqrt(eps)/sqrt(2) * kappa of v_sl
    double zy = 0.0;  // d zeta / d y
};

Frame frame_at(const HeatFlow& flow, cplx tau, double epsilon, double t) {
    Frame f;
    f.a = flow.critical_point(t);
    f.c2 = flow.dy(2, t, f.a);
    f.kappa = std::sqrt(std::fabs(f.c2));
    f.s_tau = std::sqrt(epsilon) / kSqrt2 * f.kappa * tau;
    f.ca = std::sqrt(epsilon) / kSqrt2 * f.kappa;
    f.zy = std::sqrt(f.kappa) / std::pow(2.0 * epsilon, 0.25);
    return f;
}

cplx dv_sl_at(const HeatFlow& flow, const LayerProfile& prof, cplx tau,
              double epsilon, double t, double y) {
    const Frame f = frame_at(flow, tau, epsilon, t);
    const double d = y - f.a;
    double ph[4];
    phi_derivs(d, ph);
    const double zeta = f.zy * d;
    return f.ca * (ph[1] * prof.V(zeta, 0) + ph[0] * prof.V(zeta, 1) * f.zy);
}

}  // namespace

double GaussianHeatFlow::dy(int m, double t, double y) const {
    return us_heat_dy(m, t, y);
}

double GaussianHeatFlow::critical_point(double t) const {
    return std::sqrt((1.0 + 4.0 * t) / 2.0);
}

double FrozenFlow::dy(int m, double, double y) const {
    switch (m) {
        case 0: return flow_.Us(y);
        case 1: return flow_.Us1(y);
        case 2: return flow_.Us2(y);
        case 3: return flow_.Us3(y);
        default: throw std::invalid_argument("FrozenFlow::dy: order out of range");
    }
}

double FrozenQuadraticFlow::dy(int m, double, double y) const {
    const double d = y - a_;
    switch (m) {
        case 0: return 0.5 * c2_ * d * d;
        case 1: return c2_ * d;
        case 2: return c2_;
        case 3: return 0.0;
        default: throw std::invalid_argument("FrozenQuadraticFlow::dy: order out of range");
    }
}

LayerProfile::LayerProfile(const ShearLayerProfile& profile) {
    const std::size_t n2 = profile.z_nodes.size();
    if (n2 < 8 || n2 % 2 != 0) {
        throw std::invalid_argument("LayerProfile: malformed shear-layer profile");
    }
    const std::size_t half = n2 / 2;  // left branch: 0..half-1, right: half..n2-1
    std::vector<double> zr(profile.z_nodes.begin() + half, profile.z_nodes.end());
    std::vector<cplx> vr(profile.V.begin() + half, profile.V.end());
    std::vector<double> zl(half);
    std::vector<cplx> vl(half);
    for (std::size_t j = 0; j < half; ++j) {
        zl[j] = -profile.z_nodes[half - 1 - j];
        vl[j] = profile.V[half - 1 - j];
    }
    right_ = CubicSpline(zr, vr);
    left_ = CubicSpline(zl, vl);
    tau_ = profile.tau;
    z0_ = profile.z_nodes.back();
}

cplx LayerProfile::V(double z, int der) const {
    if (std::fabs(z) > z0_) return cplx(0.0, 0.0);
    const CubicSpline& s = (z >= 0.0) ? right_ : left_;
    const double x = std::fabs(z);
    const double sign = (z >= 0.0 || der % 2 == 0) ? 1.0 : -1.0;
    switch (der) {
        case 0: return sign * s(x);
        case 1: return sign * s.derivative(x);
        case 2: return sign * s.second_derivative(x);
        default: throw std::invalid_argument("LayerProfile::V: derivative order out of range");
    }
}

double track_critical_point(const HeatFlow& flow, double t, int nsteps,
                            double curvature_floor) {
    if (nsteps < 1) throw std::invalid_argument("track_critical_point: nsteps < 1");
    double a = flow.critical_point(0.0);
    if (t == 0.0) return a;
    const double h = t / nsteps;
    auto rhs = [&](double s, double av) {
        const double c2 = flow.dy(2, s, av);
        if (std::fabs(c2) < curvature_floor) {
            throw NonConvergenceError("track_critical_point: curvature floor reached");
        }
        return -flow.dt_dy(s, av) / c2;
    };
    for (int i = 0; i < nsteps; ++i) {
        const double s = i * h;
        const double k1 = rhs(s, a);
        const double k2 = rhs(s + 0.5 * h, a + 0.5 * h * k1);
        const double k3 = rhs(s + 0.5 * h, a + 0.5 * h * k2);
        const double k4 = rhs(s + h, a + h * k3);
        a += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    const double c2 = flow.dy(2, t, a);
    if (std::fabs(c2) < curvature_floor) {
        throw NonConvergenceError("track_critical_point: curvature floor reached");
    }
    return a;
}

cplx omega_eps(const HeatFlow& flow, cplx tau, double epsilon, double t) {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) {
        throw std::invalid_argument("omega_eps: epsilon outside (0,1]");
    }
    const double a = flow.critical_point(t);
    const double kappa = std::sqrt(std::fabs(flow.dy(2, t, a)));
    return -flow.dy(0, t, a) + std::sqrt(epsilon) / kSqrt2 * kappa * tau;
}

double sigma0_of(const HeatFlow& flow, cplx tau) {
    const double kappa = std::sqrt(std::fabs(flow.curvature(0.0)));
    return kappa * std::fabs(tau.imag()) / kSqrt2;
}

double phase_exponent(const HeatFlow& flow, cplx tau, double epsilon, double t) {
    if (t == 0.0) return 0.0;
    const int n = 64;
    const double h = t / n;
    std::vector<double> f(n + 1);
    for (int i = 0; i <= n; ++i) {
        f[i] = -omega_eps(flow, tau, epsilon, i * h).imag();
    }
    return simpson(f, h) / epsilon;
}

std::vector<double> quasimode_grid(const HeatFlow& flow, double epsilon, double t) {
    const double a = flow.critical_point(t);
    const double c2 = flow.dy(2, t, a);
    const double width = std::pow(2.0 * epsilon, 0.25) * std::pow(std::fabs(c2), -0.25);
    const int n_outer = 2001;
    int n_layer = 4001;
    const double band = 0.45;
    const int needed = static_cast<int>(std::ceil(2.0 * band * 32.0 / width)) + 1;
    n_layer = std::max(n_layer, needed);

    std::vector<double> g;
    g.reserve(n_outer + n_layer);
    for (int i = 0; i < n_outer; ++i) g.push_back(10.0 * i / (n_outer - 1));
    for (int i = 0; i < n_layer; ++i) {
        g.push_back(a - band + 2.0 * band * i / (n_layer - 1));
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    std::vector<double> out;
    out.reserve(g.size());
    for (double y : g) {
        if (y >= 0.0 && y <= 10.0) out.push_back(y);
    }
    return out;
}

double weighted_sup(const std::vector<double>& y, const std::vector<double>& absval,
                    double alpha_w) {
    double m = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        m = std::max(m, std::exp(alpha_w * y[i]) * absval[i]);
    }
    return m;
}

QuasimodeFields build_fields(const HeatFlow& flow, const LayerProfile& profile,
                             double epsilon, double t,
                             const std::vector<double>& y_grid) {
    if (y_grid.size() < 2) throw std::invalid_argument("build_fields: empty grid");
    const Frame f = frame_at(flow, profile.tau(), epsilon, t);
    const double width = std::pow(2.0 * epsilon, 0.25) * std::pow(std::fabs(f.c2), -0.25);

    // Layer resolution precondition: >= 16 nodes inside one layer width.
    int inside = 0;
    for (double y : y_grid) {
        if (std::fabs(y - f.a) <= 0.5 * width) ++inside;
    }
    if (inside < 16) {
        throw std::invalid_argument("build_fields: grid under-resolves the shear layer");
    }

    QuasimodeFields out;
    out.epsilon = epsilon;
    out.t = t;
    out.omega = omega_eps(flow, profile.tau(), epsilon, t);
    out.cutoff_radius = 0.3;
    out.y = y_grid;
    const std::size_t n = y_grid.size();
    out.v_reg.resize(n);
    out.v_sl.resize(n);
    out.u_eps.resize(n);

    const double ua = flow.dy(0, t, f.a);
    const cplx iu(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double y = y_grid[i];
        const double d = y - f.a;
        const double H = d > 0.0 ? 1.0 : 0.0;
        double ph[4];
        phi_derivs(d, ph);
        const double zeta = f.zy * d;
        const cplx V0 = profile.V(zeta, 0);
        const cplx V1 = profile.V(zeta, 1);
        out.v_reg[i] = H * (flow.dy(0, t, y) - ua + f.s_tau);
        out.v_sl[i] = f.ca * ph[0] * V0;
        const cplx dv_reg = H * flow.dy(1, t, y);
        const cplx dv_sl = f.ca * (ph[1] * V0 + ph[0] * V1 * f.zy);
        out.u_eps[i] = iu * (dv_reg + dv_sl);
    }
    return out;
}

ResidualReport residual(const HeatFlow& flow, const LayerProfile& profile,
                        double epsilon, const std::vector<double>& t_samples) {
    const cplx tau = profile.tau();
    ResidualReport rep;
    rep.epsilon = epsilon;
    rep.sigma0 = sigma0_of(flow, tau);
    const cplx iu(0.0, 1.0);
    const double dt = 1e-6;

    for (double t : t_samples) {
        const std::vector<double> y = quasimode_grid(flow, epsilon, t);
        const Frame f = frame_at(flow, tau, epsilon, t);
        const double ua = flow.dy(0, t, f.a);

        std::vector<double> abs_block(y.size()), abs_cut(y.size()), abs_u(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double yy = y[i];
            const double d = yy - f.a;
            const double H = d > 0.0 ? 1.0 : 0.0;
            const double u0 = flow.dy(0, t, yy);
            const double u1 = flow.dy(1, t, yy);
            const double u3 = flow.dy(3, t, yy);
            double ph[4];
            phi_derivs(d, ph);
            const double zeta = f.zy * d;
            const cplx V0 = profile.V(zeta, 0);
            const cplx V1 = profile.V(zeta, 1);
            const cplx V2 = profile.V(zeta, 2);
            const cplx v_sl = f.ca * ph[0] * V0;
            const cplx dv_sl = f.ca * (ph[1] * V0 + ph[0] * V1 * f.zy);

            // Taylor remainders evaluated from the true flow, not re-expanded.
            const double r3 = u0 - ua - 0.5 * f.c2 * d * d;
            const double q2 = u1 - f.c2 * d;
            const cplx T1 = -r3 * dv_sl / epsilon;
            const cplx T2 = q2 * v_sl / epsilon;
            const cplx R3 = -iu * epsilon * H * u3;
            const cplx dtdy_vsl =
                (dv_sl_at(flow, profile, tau, epsilon, t + dt, yy) -
                 dv_sl_at(flow, profile, tau, epsilon, t - dt, yy)) /
                (2.0 * dt);
            const cplx R4 = iu * (H * flow.dt_dy(t, yy) + dtdy_vsl);

            // Cutoff block: every phi-derivative term, kept exactly.
            const cplx Tphi = -(0.5 * f.c2 * d * d + f.s_tau) * f.ca * ph[1] * V0 / epsilon -
                              iu * f.ca * (ph[3] * V0 + 3.0 * ph[2] * V1 * f.zy +
                                           3.0 * ph[1] * V2 * f.zy * f.zy);

            abs_block[i] = std::abs(T1 + T2 + R3 + R4);
            abs_cut[i] = std::abs(Tphi);
            abs_u[i] = std::abs(cplx(H * u1, 0.0) + dv_sl);
        }

        const double bnorm = weighted_sup(y, abs_block);
        const double cnorm = weighted_sup(y, abs_cut);
        const double unorm = weighted_sup(y, abs_u);
        const double phase = std::exp(phase_exponent(flow, tau, epsilon, t));
        const double decay = std::exp(rep.sigma0 * t / std::sqrt(epsilon));

        rep.times.push_back(t);
        rep.block_norm.push_back(bnorm);
        rep.cutoff_norm.push_back(cnorm);
        rep.u_norm.push_back(unorm);
        rep.residual_norm.push_back(bnorm * phase);
        rep.envelope_ratio.push_back(bnorm * phase / decay);
        rep.u_ratio.push_back(unorm * phase / decay);
    }
    return rep;
}

void export_envelope(const std::string& path, const std::vector<ResidualReport>& reports) {
    CsvWriter csv(path,
                  {"epsilon", "t", "u_norm", "u_ratio", "residual_norm",
                   "envelope_ratio", "block_norm", "cutoff_norm", "sigma0"});
    for (const auto& r : reports) {
        for (std::size_t i = 0; i < r.times.size(); ++i) {
            csv.row({r.epsilon, r.times[i], r.u_norm[i], r.u_ratio[i],
                     r.residual_norm[i], r.envelope_ratio[i], r.block_norm[i],
                     r.cutoff_norm[i], r.sigma0});
        }
    }
}

}  // namespace prandtl
