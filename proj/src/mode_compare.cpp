#include "prandtl/mode_compare.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace prandtl {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

struct TheoryFrame {
    double usa;      // U_s(a)
    double kappa;    // |U''(a)|^{1/2}
    cplx s_tau;      // sqrt(eps)/sqrt(2) kappa tau
    cplx vreg_inf;   // -U_s(a) + s_tau
    double va_inf;   // -U_s(a)
};

TheoryFrame theory_frame(const BaseFlow& flow, cplx tau, double epsilon) {
    TheoryFrame f;
    f.usa = flow.Us(flow.a);
    f.kappa = std::sqrt(std::fabs(flow.curvature));
    f.s_tau = std::sqrt(epsilon) / kSqrt2 * f.kappa * tau;
    f.vreg_inf = -f.usa + f.s_tau;
    f.va_inf = -f.usa;
    return f;
}

cplx v_a(const BaseFlow& flow, double y) {
    return y > flow.a ? cplx(flow.Us(y) - flow.Us(flow.a), 0.0) : cplx(0.0, 0.0);
}

cplx vth_out_at(const BaseFlow& flow, const TheoryFrame& f, double epsilon, double y) {
    const cplx vreg =
        y > flow.a ? flow.Us(y) - f.usa + f.s_tau : cplx(0.0, 0.0);
    return (vreg / f.vreg_inf - v_a(flow, y) / f.va_inf) / std::sqrt(epsilon);
}

class ModeInterp {
  public:
    ModeInterp(const ExtractedMode& mode) {
        std::vector<double> re(mode.v.size()), im(mode.v.size());
        for (std::size_t i = 0; i < mode.v.size(); ++i) {
            re[i] = mode.v[i].real();
            im[i] = mode.v[i].imag();
        }
        re_ = PchipInterpolator(mode.y, re);
        im_ = PchipInterpolator(mode.y, im);
        lo_ = mode.y.front();
        hi_ = mode.y.back();
    }

    cplx operator()(double y) const {
        if (y < lo_ || y > hi_)
            throw std::invalid_argument("mode interpolation: y outside the simulation grid");
        return cplx(re_(y), im_(y));
    }

  private:
    PchipInterpolator re_, im_;
    double lo_ = 0.0, hi_ = 0.0;
};

}  // namespace

std::vector<cplx> outer_correction_theory(const BaseFlow& flow, cplx tau,
                                          double epsilon,
                                          const std::vector<double>& y_grid) {
    const TheoryFrame f = theory_frame(flow, tau, epsilon);
    std::vector<cplx> out(y_grid.size());
    for (std::size_t i = 0; i < y_grid.size(); ++i) {
        out[i] = vth_out_at(flow, f, epsilon, y_grid[i]);
    }
    return out;
}

std::vector<cplx> outer_correction_numeric(const ExtractedMode& mode,
                                           const BaseFlow& flow, double epsilon,
                                           const std::vector<double>& y_grid) {
    const ModeInterp vhat(mode);
    const double va_inf = -flow.Us(flow.a);
    std::vector<cplx> out(y_grid.size());
    for (std::size_t i = 0; i < y_grid.size(); ++i) {
        const double y = y_grid[i];
        out[i] = (vhat(y) - v_a(flow, y) / va_inf) / std::sqrt(epsilon);
    }
    return out;
}

std::pair<std::vector<cplx>, std::vector<cplx>> inner_correction_pair(
    const ExtractedMode& mode, const LayerProfile& profile, const BaseFlow& flow,
    double epsilon, const std::vector<double>& z_grid) {
    const TheoryFrame f = theory_frame(flow, profile.tau(), epsilon);
    const ModeInterp vhat(mode);
    const double e14 = std::pow(epsilon, 0.25);
    const double zy = std::sqrt(f.kappa) / std::pow(2.0 * epsilon, 0.25);

    std::vector<cplx> th(z_grid.size()), num(z_grid.size());
    for (std::size_t i = 0; i < z_grid.size(); ++i) {
        const double y = flow.a + e14 * z_grid[i];
        const double d = y - flow.a;
        const cplx vsl = std::sqrt(epsilon) / kSqrt2 * cutoff_phi(d) * f.kappa *
                         profile.V(zy * d, 0);
        th[i] = vsl / f.vreg_inf / std::sqrt(epsilon);
        const cplx vnum_out =
            (vhat(y) - v_a(flow, y) / f.va_inf) / std::sqrt(epsilon);
        num[i] = vnum_out - vth_out_at(flow, f, epsilon, y);
    }
    return {th, num};
}

std::vector<cplx> inner_correction_literal(const ExtractedMode& mode,
                                           const BaseFlow& flow, double epsilon,
                                           const std::vector<double>& z_grid) {
    const ModeInterp vhat(mode);
    const double va_inf = -flow.Us(flow.a);
    const double e14 = std::pow(epsilon, 0.25);
    std::vector<cplx> out(z_grid.size());
    for (std::size_t i = 0; i < z_grid.size(); ++i) {
        const double y = flow.a + e14 * z_grid[i];
        const cplx vnum_out = (vhat(y) - v_a(flow, y) / va_inf) / std::sqrt(epsilon);
        out[i] = vhat(y) / std::sqrt(epsilon) - vnum_out;
    }
    return out;
}

ComparisonReport compare(const ExtractedMode& mode, const LayerProfile& profile,
                         const BaseFlow& flow, double epsilon) {
    ComparisonReport rep;
    rep.epsilon = epsilon;
    rep.layer_width =
        std::pow(2.0 * epsilon, 0.25) / std::pow(std::fabs(flow.curvature), 0.25);
    rep.exclusion_radius = 5.0 * rep.layer_width;

    // Outer legs on the simulation grid itself (no interpolation error on the
    // numeric side); comparison windows exclude y > 9 where both legs vanish.
    std::vector<double> ys;
    for (double y : mode.y) {
        if (y <= 9.0) ys.push_back(y);
    }
    rep.outer_y = ys;
    rep.outer_theory = outer_correction_theory(flow, profile.tau(), epsilon, ys);
    {
        const double va_inf = -flow.Us(flow.a);
        rep.outer_numeric.resize(ys.size());
        for (std::size_t i = 0; i < ys.size(); ++i) {
            rep.outer_numeric[i] =
                (mode.v[i] - v_a(flow, ys[i]) / va_inf) / std::sqrt(epsilon);
        }
    }

    rep.radii_widths = {3.0, 5.0, 8.0};
    std::vector<double> sup_diff(3, 0.0), sup_th(3, 0.0);
    for (std::size_t i = 0; i < ys.size(); ++i) {
        const double dist = std::fabs(ys[i] - flow.a);
        const double diff = std::abs(rep.outer_numeric[i] - rep.outer_theory[i]);
        const double th = std::abs(rep.outer_theory[i]);
        for (std::size_t r = 0; r < 3; ++r) {
            if (dist >= rep.radii_widths[r] * rep.layer_width) {
                sup_diff[r] = std::max(sup_diff[r], diff);
                sup_th[r] = std::max(sup_th[r], th);
            }
        }
    }
    rep.outer_sup_err = sup_diff[1] / sup_th[1];
    for (std::size_t r = 0; r < 3; ++r) {
        rep.outer_mismatch_fixed.push_back(sup_diff[r] / sup_th[0]);
    }

    rep.inner_z.resize(401);
    for (int i = 0; i < 401; ++i) rep.inner_z[i] = -5.0 + i * 0.025 + 0.01;
    auto [th, num] =
        inner_correction_pair(mode, profile, flow, epsilon, rep.inner_z);
    rep.inner_theory = std::move(th);
    rep.inner_numeric = std::move(num);
    rep.inner_literal = inner_correction_literal(mode, flow, epsilon, rep.inner_z);

    double sd = 0.0, st = 0.0;
    for (std::size_t i = 0; i < rep.inner_z.size(); ++i) {
        sd = std::max(sd, std::abs(rep.inner_numeric[i] - rep.inner_theory[i]));
        st = std::max(st, std::abs(rep.inner_theory[i]));
    }
    rep.inner_sup_err = sd / st;
    rep.jump_theory = rep.inner_theory[201] - rep.inner_theory[199];
    rep.jump_numeric = rep.inner_numeric[201] - rep.inner_numeric[199];
    return rep;
}

void export_outer(const std::string& path, const ComparisonReport& rep) {
    CsvWriter csv(path, {"y", "re_theory", "im_theory", "re_numeric", "im_numeric"},
                  "outer corrections (v/v(inf) - v_a/v_a(inf))/sqrt(eps)");
    for (std::size_t i = 0; i < rep.outer_y.size(); ++i) {
        csv.row({rep.outer_y[i], rep.outer_theory[i].real(),
                 rep.outer_theory[i].imag(), rep.outer_numeric[i].real(),
                 rep.outer_numeric[i].imag()});
    }
}

void export_inner(const std::string& path, const ComparisonReport& rep) {
    CsvWriter csv(path, {"z", "re_theory", "im_theory", "re_numeric", "im_numeric"},
                  "inner corrections at y = a + eps^{1/4} z");
    for (std::size_t i = 0; i < rep.inner_z.size(); ++i) {
        csv.row({rep.inner_z[i], rep.inner_theory[i].real(),
                 rep.inner_theory[i].imag(), rep.inner_numeric[i].real(),
                 rep.inner_numeric[i].imag()});
    }
}

void export_inner_literal(const std::string& path, const ComparisonReport& rep) {
    CsvWriter csv(path, {"z", "re_literal", "im_literal"},
                  "v^num_in taken verbatim: vhat(y)/sqrt(eps) - v^num_out(y)");
    for (std::size_t i = 0; i < rep.inner_z.size(); ++i) {
        csv.row({rep.inner_z[i], rep.inner_literal[i].real(),
                 rep.inner_literal[i].imag()});
    }
}

}  // namespace prandtl
