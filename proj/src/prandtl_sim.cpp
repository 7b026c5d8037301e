#include "prandtl/prandtl_sim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

#include "prandtl/complexode.hpp"

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace prandtl {

namespace {

constexpr double kSigmaTarget = 0.9247;  // expected |Im omega|/sqrt(eps) scale
constexpr int kKl = 2, kKu = 2, kLdab = 2 * kKl + kKu + 1;

double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median of empty sample");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

StretchedGrid build_grid(int N, double L, double a, double width, double frac,
                         double span) {
    if (N < 500) throw std::invalid_argument("build_grid: N < 500");
    if (L < 8.0) throw std::invalid_argument("build_grid: L < 8");
    if (!(width > 0.0)) throw std::invalid_argument("build_grid: width <= 0");
    if (!(a > 0.0 && a < L)) throw std::invalid_argument("build_grid: a outside (0,L)");
    const double R = span * width;
    const double sg = R / 2.5;
    const double inside = std::erf(2.5 / std::sqrt(2.0));
    if (!(frac > 0.0 && frac < inside))
        throw std::invalid_argument("build_grid: frac outside (0, erf(2.5/sqrt 2))");
    // beta solves (|band| + beta b_in) / (L + beta b_tot) = frac for the band
    // |y-a| <= R clipped to [0, L]; b_in and b_tot are the bump masses over the
    // clipped band and the whole domain.
    const double band_lo = std::max(a - R, 0.0);
    const double band_hi = std::min(a + R, L);
    const double bump_scale = sg * std::sqrt(kPi / 2.0);
    const auto bump_mass = [&](double lo, double hi) {
        return bump_scale * (std::erf((hi - a) / (std::sqrt(2.0) * sg)) -
                             std::erf((lo - a) / (std::sqrt(2.0) * sg)));
    };
    const double b_in = bump_mass(band_lo, band_hi);
    const double b_tot = bump_mass(0.0, L);
    const double denom = b_in - frac * b_tot;
    if (!(denom > 0.0))
        throw std::invalid_argument("build_grid: infeasible clustering request");
    double beta = (frac * L - (band_hi - band_lo)) / denom;
    beta = std::max(beta, 0.0);

    auto C = [&](double y) {
        return y + beta * sg * std::sqrt(kPi / 2.0) *
                       (std::erf((y - a) / (std::sqrt(2.0) * sg)) +
                        std::erf(a / (std::sqrt(2.0) * sg)));
    };
    const double Ctot = C(L);

    StretchedGrid g;
    g.L = L;
    g.a = a;
    g.width = width;
    g.beta = beta;
    g.y.resize(N + 1);
    double lo = 0.0;
    for (int i = 0; i <= N; ++i) {
        const double target = Ctot * i / N;
        double lo_ = lo, hi_ = L;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo_ + hi_);
            if (C(mid) < target) lo_ = mid;
            else hi_ = mid;
        }
        g.y[i] = 0.5 * (lo_ + hi_);
        lo = std::max(0.0, g.y[i] - 1.0);
    }
    g.y.front() = 0.0;
    g.y.back() = L;

    // Invariants of the type, enforced at construction.
    int in_layer = 0;
    double min_h = L;
    for (int i = 0; i < N; ++i) {
        const double h = g.y[i + 1] - g.y[i];
        if (!(h > 0.0)) throw std::invalid_argument("build_grid: nodes not increasing");
        min_h = std::min(min_h, h);
        if (i > 0) {
            const double hp = g.y[i] - g.y[i - 1];
            const double ratio = std::max(h / hp, hp / h);
            if (ratio > 1.05)
                throw std::invalid_argument("build_grid: adjacent spacing ratio > 1.05");
        }
    }
    for (double y : g.y) {
        if (std::fabs(y - a) <= R) ++in_layer;
    }
    if (3 * in_layer < N + 1)
        throw std::invalid_argument("build_grid: fewer than 1/3 of nodes in the layer band");
    if (min_h > width / 16.0)
        throw std::invalid_argument("build_grid: layer under-resolved (min spacing > width/16)");
    return g;
}

void PentaDiag::resize(int dim) {
    n = dim;
    for (auto& d : diag) d.assign(dim, cplx(0.0, 0.0));
}

std::vector<cplx> PentaDiag::matvec(const std::vector<cplx>& x) const {
    std::vector<cplx> out(n, cplx(0.0, 0.0));
    for (int o = -2; o <= 2; ++o) {
        const auto& d = diag[o + 2];
        const int i0 = std::max(0, -o);
        const int i1 = std::min(n, n - o);
        for (int i = i0; i < i1; ++i) out[i] += d[i] * x[i + o];
    }
    return out;
}

BandedOperators assemble(const StretchedGrid& grid, const BaseFlow& flow,
                         double epsilon, double omega_shift) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("assemble: epsilon <= 0");
    const int N = static_cast<int>(grid.y.size()) - 1;
    BandedOperators ops;
    ops.N = N;
    ops.epsilon = epsilon;
    ops.omega_shift = omega_shift;
    ops.M.resize(N + 1);
    ops.A.resize(N + 1);

    const cplx iu(0.0, 1.0);
    const auto& y = grid.y;
    for (int i = 3; i <= N - 2; ++i) {
        const std::vector<double> x2(y.begin() + i - 1, y.begin() + i + 2);
        const std::vector<double> x4(y.begin() + i - 2, y.begin() + i + 3);
        const std::vector<double> w2 = fornberg_weights(x2, y[i], 2);
        const std::vector<double> w4 = fornberg_weights(x4, y[i], 4);
        const double us = flow.Us(y[i]);
        const double upp = flow.Us2(y[i]);
        for (int j = 0; j < 3; ++j) {
            const int o = (i - 1 + j) - i;
            ops.M.diag[o + 2][i] += w2[j];
            ops.A.diag[o + 2][i] += -iu * us * w2[j] - iu * omega_shift * w2[j];
        }
        ops.A.diag[2][i] += iu * upp;
        for (int j = 0; j < 5; ++j) {
            const int o = (i - 2 + j) - i;
            ops.A.diag[o + 2][i] += epsilon * w4[j];
        }
    }

    auto stencil = [&](int first, int count, double at, int order) {
        const std::vector<double> xs(y.begin() + first, y.begin() + first + count);
        return fornberg_weights(xs, at, order);
    };
    ops.bc.push_back({0, 0, {1.0}});                             // V(0) = 0
    ops.bc.push_back({1, 0, stencil(0, 4, y[0], 1)});            // V'(0) = 0
    ops.bc.push_back({2, 0, stencil(0, 5, y[0], 3)});            // V'''(0) = 0
    ops.bc.push_back({N - 1, N - 3, stencil(N - 3, 4, y[N], 1)});  // V'(L) = 0
    ops.bc.push_back({N, N - 2, stencil(N - 2, 3, y[N], 2)});      // V''(L) = 0
    return ops;
}

CnStepper::CnStepper(const BandedOperators& ops, double dtheta) : dtheta_(dtheta) {
    if (!(dtheta > 0.0)) throw std::invalid_argument("CnStepper: dtheta <= 0");
    n_ = ops.N + 1;
    static_assert(sizeof(lapack_int) == sizeof(int), "LP64 LAPACK expected");

    PentaDiag lhs;
    lhs.resize(n_);
    rhs_.resize(n_);
    for (int o = -2; o <= 2; ++o) {
        for (int i = 0; i < n_; ++i) {
            const cplx m = ops.M.diag[o + 2][i];
            const cplx a = ops.A.diag[o + 2][i];
            lhs.diag[o + 2][i] = m - 0.5 * dtheta * a;
            rhs_.diag[o + 2][i] = m + 0.5 * dtheta * a;
        }
    }
    for (const auto& bc : ops.bc) {
        for (int o = -2; o <= 2; ++o) {
            lhs.diag[o + 2][bc.row] = cplx(0.0, 0.0);
            rhs_.diag[o + 2][bc.row] = cplx(0.0, 0.0);
        }
        for (std::size_t j = 0; j < bc.w.size(); ++j) {
            const int col = bc.col0 + static_cast<int>(j);
            const int o = col - bc.row;
            if (o < -2 || o > 2)
                throw std::invalid_argument("CnStepper: boundary stencil exceeds bandwidth");
            lhs.diag[o + 2][bc.row] = bc.w[j];
        }
    }

    // LAPACK banded storage, column major: AB[kl+ku+i-j, j].
    ab_.assign(static_cast<std::size_t>(kLdab) * n_, cplx(0.0, 0.0));
    for (int o = -2; o <= 2; ++o) {
        const int i0 = std::max(0, -o);
        const int i1 = std::min(n_, n_ - o);
        for (int i = i0; i < i1; ++i) {
            const int j = i + o;
            ab_[static_cast<std::size_t>(j) * kLdab + (kKl + kKu + i - j)] =
                lhs.diag[o + 2][i];
        }
    }
    ipiv_.resize(n_);
    const int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n_, n_, kKl, kKu, ab_.data(),
                                    kLdab, ipiv_.data());
    if (info != 0) throw NonConvergenceError("CnStepper: singular CN matrix (zgbtrf)");
}

std::vector<cplx> CnStepper::step(const std::vector<cplx>& V) const {
    if (static_cast<int>(V.size()) != n_)
        throw std::invalid_argument("CnStepper::step: size mismatch");
    std::vector<cplx> b = rhs_.matvec(V);
    const int info = LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', n_, kKl, kKu, 1,
                                    const_cast<cplx*>(ab_.data()), kLdab,
                                    const_cast<int*>(ipiv_.data()), b.data(), n_);
    if (info != 0) throw NonConvergenceError("CnStepper: zgbtrs failed");
    return b;
}

EvolveResult evolve(double k, const BaseFlow& flow, const EvolveParams& params) {
    if (!(k > 0.0)) throw std::invalid_argument("evolve: k <= 0");
    if (params.window < 2 || params.window > params.nsteps)
        throw std::invalid_argument("evolve: bad estimator window");
    const auto t0 = std::chrono::steady_clock::now();

    EvolveResult res;
    res.k = k;
    res.epsilon = 1.0 / k;
    const double width =
        std::pow(2.0 * res.epsilon, 0.25) / std::pow(std::fabs(flow.curvature), 0.25);
    res.grid = build_grid(params.N, params.L, flow.a, width);
    const double omega0 = -flow.Us(flow.a);
    const BandedOperators ops = assemble(res.grid, flow, res.epsilon, omega0);
    res.dtheta = 1.0 / (params.steps_per_efold * std::sqrt(res.epsilon) * kSigmaTarget);
    const CnStepper stepper(ops, res.dtheta);
    const int n = params.N + 1;

    std::vector<cplx> V(n);
    if (params.initial != nullptr) {
        // User data is taken verbatim (a restarted eigenmode must not be
        // dented at the constrained rows; the CN step re-imposes the
        // boundary stencils on its output regardless).
        if (static_cast<int>(params.initial->size()) != n)
            throw std::invalid_argument("evolve: initial data size mismatch");
        V = *params.initial;
    } else {
        std::mt19937_64 rng(params.seed);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (int i = 0; i < n; ++i) {
            const double re = unif(rng);
            const double im = unif(rng);
            V[i] = cplx(re, im);
        }
        for (const auto& bc : ops.bc) V[bc.row] = cplx(0.0, 0.0);
    }
    double vmax = 0.0;
    for (const auto& v : V) vmax = std::max(vmax, std::abs(v));
    if (vmax == 0.0) throw std::invalid_argument("evolve: zero initial data");
    for (auto& v : V) v /= vmax;

    const cplx iu(0.0, 1.0);
    std::vector<cplx> med_hist;
    med_hist.reserve(params.window);
    std::vector<cplx> om_last;
    cplx med_last(0.0, 0.0);
    double log_amp_window_start = 0.0;

    for (int step = 0; step < params.nsteps; ++step) {
        if (step == params.nsteps - params.window) log_amp_window_start = res.log_amp;
        std::vector<cplx> raw = stepper.step(V);
        double m = 0.0;
        for (const auto& v : raw) m = std::max(m, std::abs(v));
        if (!(m > 0.0) || !std::isfinite(m))
            throw NonConvergenceError("evolve: iterate collapsed or overflowed");
        if (step >= params.nsteps - params.window) {
            double prev_max = 0.0;
            for (const auto& v : V) prev_max = std::max(prev_max, std::abs(v));
            std::vector<cplx> om;
            std::vector<double> re, im;
            for (int i = 0; i < n; ++i) {
                if (std::abs(V[i]) >= 0.1 * prev_max) {
                    const cplx w = std::log(raw[i] / V[i]) / (iu * res.dtheta);
                    om.push_back(w);
                    re.push_back(w.real());
                    im.push_back(w.imag());
                }
            }
            const cplx med(median(re), median(im));
            med_hist.push_back(med);
            om_last = std::move(om);
            med_last = med;
        }
        for (int i = 0; i < n; ++i) V[i] = raw[i] / m;
        res.log_amp += std::log(m);
    }

    res.V = V;
    res.window_rate =
        (res.log_amp - log_amp_window_start) / (params.window * res.dtheta);

    const cplx omega_corr = med_hist.back();
    double sy = 0.0;
    for (const auto& w : om_last) sy += std::norm(w - med_last);
    sy = std::sqrt(sy / om_last.size());

    res.estimate.omega = omega_corr + omega0;
    res.estimate.spread_y = sy;
    res.estimate.spread_theta = std::abs(med_hist.back() - med_hist.front());
    res.estimate.window = {(params.nsteps - params.window) * res.dtheta,
                           params.nsteps * res.dtheta};
    const double scale = std::abs(omega_corr);
    res.estimate.converged = scale > 0.0 &&
                             res.estimate.spread_y <= params.spread_rel_tol * scale &&
                             res.estimate.spread_theta <= params.spread_rel_tol * scale;
    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

ExtractedMode extract_mode(const EvolveResult& result) {
    const std::size_t n = result.V.size();
    const std::size_t nfar = n / 10;
    if (nfar == 0) throw std::invalid_argument("extract_mode: too few nodes");
    cplx far(0.0, 0.0);
    for (std::size_t i = n - nfar; i < n; ++i) far += result.V[i];
    far /= static_cast<double>(nfar);
    if (std::abs(far) == 0.0)
        throw NonConvergenceError("extract_mode: vanishing far field");
    ExtractedMode mode;
    mode.y = result.grid.y;
    mode.far_raw = far;
    mode.v.resize(n);
    for (std::size_t i = 0; i < n; ++i) mode.v[i] = result.V[i] / far;
    return mode;
}

int default_node_count(double k) {
    const double n = 2500.0 + 500.0 * std::log10(k / 1e3);
    return static_cast<int>(std::lround(std::clamp(n, 2500.0, 4000.0)));
}

std::vector<SweepRow> sweep_k(const std::vector<double>& ks, const BaseFlow& flow,
                              const SweepParams& params) {
    std::vector<SweepRow> rows(ks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= ks.size()) return;
            const double k = ks[idx];
            SweepRow row;
            row.k = k;
            EvolveParams ep;
            ep.N = default_node_count(k);
            ep.L = params.L;
            ep.nsteps = params.nsteps;
            ep.steps_per_efold = params.steps_per_efold;
            ep.window = params.window;
            ep.seed = params.base_seed ^ static_cast<std::uint64_t>(k);
            row.n_nodes = ep.N;
            try {
                const EvolveResult r = evolve(k, flow, ep);
                row.dtheta = r.dtheta;
                row.omega = r.estimate.omega;
                row.rescaled = (r.estimate.omega + flow.Us(flow.a)) * std::sqrt(k);
                row.spread_y = r.estimate.spread_y;
                row.spread_theta = r.estimate.spread_theta;
                row.wall_seconds = r.wall_seconds;
                row.ok = true;
                row.converged = r.estimate.converged;
            } catch (const std::exception& e) {
                row.ok = false;
                row.error = e.what();
                const double nan = std::numeric_limits<double>::quiet_NaN();
                row.dtheta = nan;
                row.omega = cplx(nan, nan);
                row.rescaled = cplx(nan, nan);
                row.spread_y = row.spread_theta = row.wall_seconds = nan;
            }
            rows[idx] = std::move(row);
        }
    };
    const int nthreads =
        std::max(1, std::min<int>(params.threads, static_cast<int>(ks.size())));
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return rows;
}

void export_sweep(const std::string& path, const std::vector<SweepRow>& rows) {
    CsvWriter csv(path,
                  {"k", "re_omega", "im_omega", "re_rescaled", "im_rescaled",
                   "spread_y", "spread_theta", "n_nodes", "dtheta",
                   "wall_seconds"},
                  "omega convention: log-ratio / (i dtheta); rescaled = "
                  "(omega + U_s(a)) sqrt(k)");
    for (const auto& r : rows) {
        csv.row({r.k, r.omega.real(), r.omega.imag(), r.rescaled.real(),
                 r.rescaled.imag(), r.spread_y, r.spread_theta,
                 static_cast<double>(r.n_nodes), r.dtheta, r.wall_seconds});
    }
}

void export_mode(const std::string& path, const ExtractedMode& mode) {
    CsvWriter csv(path, {"y", "re_v", "im_v"},
                  "far-field normalized eigenmode (mean of last 10% of nodes = 1)");
    for (std::size_t i = 0; i < mode.y.size(); ++i) {
        csv.row({mode.y[i], mode.v[i].real(), mode.v[i].imag()});
    }
}

}  // namespace prandtl
