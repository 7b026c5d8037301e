// Acceptance gate: one line per criterion, continue on failure, exit 1 if any
// criterion fails.  Runs the full production pipeline end to end.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "prandtl/base_flow.hpp"
#include "prandtl/complexode.hpp"
#include "prandtl/heat_halfspace.hpp"
#include "prandtl/mode_compare.hpp"
#include "prandtl/prandtl_sim.hpp"
#include "prandtl/quasimode.hpp"
#include "prandtl/shear_layer.hpp"
#include "prandtl/spectral_operator.hpp"

using namespace prandtl;

namespace {

int g_failed = 0;

using Outcome = std::pair<bool, std::string>;

void run_criterion(int id, const std::string& label, const std::function<Outcome()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = fn();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!out.first) ++g_failed;
    std::printf("[%s] criterion %2d: %s -- %s (%.1f s)\n", out.first ? "PASS" : "FAIL", id,
                label.c_str(), out.second.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(const char* pattern, ...) {
    char buf[512];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buf, sizeof(buf), pattern, args);
    va_end(args);
    return buf;
}

}  // namespace

int main() {
    const BaseFlow flow = gaussian_shear_flow();

    // Shared artifacts (filled by the criteria that produce them).
    TauRoot root;
    ShootingTrajectory traj;
    bool have_root = false;
    std::vector<SweepRow> sweep_rows;

    run_criterion(1, "shooting root from a cold lattice scan", [&]() -> Outcome {
        const auto t0 = std::chrono::steady_clock::now();
        const cplx seed = grid_scan(-2.0, 0.0, -2.0, -0.1, 20, 6.0, 1500);
        const double tol = 1e-10 * std::abs(evans_mismatch(seed, 6.0, 6000));
        root = newton_tau(seed, tol, 40);
        traj = integrate_backward(root.tau, 6.0, 6000);
        have_root = true;
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const double dist = std::abs(root.tau - cplx(-0.706, -0.706));
        const double diag = std::abs(std::real(root.tau) - std::imag(root.tau));
        const bool ok = dist <= 0.01 && diag <= 5e-3 && secs <= 10.0;
        return {ok, fmt("tau = %.10f %+.10fi, |tau - (-0.706-0.706i)| = %.2e, |Re-Im| = %.2e",
                        std::real(root.tau), std::imag(root.tau), dist, diag)};
    });

    WeightedOperator op;
    run_criterion(2, "weighted quadratic form at the closed-form Gaussian value",
                  [&]() -> Outcome {
                      const auto t0 = std::chrono::steady_clock::now();
                      op = assemble(10.0, 3200);
                      std::vector<double> u(op.z_nodes.size());
                      for (std::size_t i = 0; i < u.size(); ++i)
                          u[i] = std::exp(-2.0 * op.z_nodes[i] * op.z_nodes[i]);
                      const double q = quadratic_form(op, u);
                      const double ref = 439.0 / 512.0 * std::sqrt(kPi);
                      const double rel = std::abs(q - ref) / ref;
                      const double secs = std::chrono::duration<double>(
                                              std::chrono::steady_clock::now() - t0)
                                              .count();
                      return {rel <= 1e-5 && secs <= 5.0,
                              fmt("(A u | u) = %.9f, reference %.9f, rel err %.2e", q, ref, rel)};
                  });

    run_criterion(3, "variational eigenvalue routed through the half-plane rotation",
                  [&]() -> Outcome {
                      const auto t0 = std::chrono::steady_clock::now();
                      const auto [alpha, vec] = top_eigenvalue(op);
                      const cplx tau_alpha = alpha_to_tau(alpha);
                      const double secs = std::chrono::duration<double>(
                                              std::chrono::steady_clock::now() - t0)
                                              .count();
                      if (!have_root) return {false, "no shooting root available"};
                      const double dist = std::abs(tau_alpha - root.tau);
                      return {dist <= 0.02 && secs <= 60.0,
                              fmt("alpha = %.8f, tau(alpha) = %.6f %+.6fi, |diff| = %.2e", alpha,
                                  std::real(tau_alpha), std::imag(tau_alpha), dist)};
                  });

    run_criterion(4, "rescaled dispersion sweep approaching -0.92 - 0.92i", [&]() -> Outcome {
        const auto t0 = std::chrono::steady_clock::now();
        SweepParams params;  // production defaults: 3600 steps, window 800
        sweep_rows = sweep_k({1e3, 1e4, 1e5, 1e6}, flow, params);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const cplx target(-0.92, -0.92);
        bool ok = secs <= 900.0;
        std::string detail;
        double prev = 1e300;
        for (const SweepRow& row : sweep_rows) {
            if (!row.ok || !row.converged) {
                ok = false;
                detail += fmt("k=%.0e failed/unconverged; ", row.k);
                continue;
            }
            const double err = std::abs(row.rescaled - target);
            if (err >= prev) ok = false;
            prev = err;
            detail += fmt("k=%.0e err %.3f; ", row.k, err);
        }
        if (sweep_rows.size() == 4 && sweep_rows[3].ok) {
            const cplx dev = sweep_rows[3].rescaled - target;
            if (std::abs(std::real(dev)) > 0.1 || std::abs(std::imag(dev)) > 0.1) ok = false;
            detail += fmt("k=1e6 rescaled %.4f %+.4fi", std::real(sweep_rows[3].rescaled),
                          std::imag(sweep_rows[3].rescaled));
        } else {
            ok = false;
        }
        return {ok, detail};
    });

    // The layer profile feeds criteria 5, 6, and 9.
    std::unique_ptr<ShearLayerProfile> slp;
    std::unique_ptr<LayerProfile> layer;
    if (have_root) {
        slp = std::make_unique<ShearLayerProfile>(build_V(build_heteroclinic(root, traj)));
        layer = std::make_unique<LayerProfile>(*slp);
    }

    run_criterion(5, "simulated mode vs asymptotic construction at eps = 1e-6",
                  [&]() -> Outcome {
                      if (layer == nullptr) return {false, "no layer profile available"};
                      const auto t0 = std::chrono::steady_clock::now();
                      EvolveParams p;  // production defaults; N from the policy
                      p.N = default_node_count(1e6);
                      const EvolveResult res = evolve(1e6, flow, p);
                      if (!res.estimate.converged)
                          return {false, "estimator did not converge at k = 1e6"};
                      const ComparisonReport rep = compare(extract_mode(res), *layer, flow, 1e-6);
                      const double secs = std::chrono::duration<double>(
                                              std::chrono::steady_clock::now() - t0)
                                              .count();
                      return {rep.outer_sup_err <= 0.10 && rep.inner_sup_err <= 0.15 &&
                                  secs <= 600.0,
                              fmt("outer sup err %.4f (<= 0.10), inner sup err %.4f (<= 0.15)",
                                  rep.outer_sup_err, rep.inner_sup_err)};
                  });

    run_criterion(6, "shear-layer jump conditions (-tau, 0, 2)", [&]() -> Outcome {
        if (slp == nullptr) return {false, "no shooting root available"};
        const double j0 = std::abs(slp->jumpV + slp->tau);
        const double j1 = std::abs(slp->jumpV1);
        const double j2 = std::abs(slp->jumpV2 - cplx(2.0, 0.0));
        return {j0 <= 1e-6 && j1 <= 1e-6 && j2 <= 1e-6,
                fmt("|[V]+tau| = %.2e, |[V']| = %.2e, |[V'']-2| = %.2e", j0, j1, j2)};
    });

    run_criterion(7, "heat half-space: manufactured solution and k-linear growth",
                  [&]() -> Outcome {
                      // Manufactured e^{-t} sin y at t = 1.
                      const double h = 0.01;
                      const std::size_t nz = static_cast<std::size_t>(std::llround(22.0 / h));
                      std::vector<double> z(nz + 1);
                      for (std::size_t i = 0; i <= nz; ++i) z[i] = i * h;
                      const std::vector<double> wz = simpson_quadrature_weights(nz, h);
                      std::vector<double> y(201);
                      for (std::size_t i = 0; i < y.size(); ++i) y[i] = 0.05 * i;
                      const auto K = kernel_matrix(1.0, y, z, wz);
                      std::vector<cplx> U0(z.size());
                      for (std::size_t i = 0; i < z.size(); ++i)
                          U0[i] = cplx(std::sin(z[i]), 0.0);
                      const auto U1 = kernel_apply(K, y.size(), z.size(), U0);
                      double sup = 0.0;
                      for (std::size_t i = 0; i < y.size(); ++i)
                          sup = std::max(sup,
                                         std::abs(U1[i] - cplx(std::exp(-1.0) * std::sin(y[i]),
                                                               0.0)));

                      // Growth-in-k table over two decades.
                      std::vector<double> ygrid(1201);
                      std::vector<cplx> W0(ygrid.size());
                      for (std::size_t i = 0; i < ygrid.size(); ++i) {
                          ygrid[i] = 0.01 * i;
                          W0[i] = cplx(ygrid[i] * std::exp(-ygrid[i] * ygrid[i]), 0.0);
                      }
                      std::vector<double> ks{10.0, 30.0, 100.0}, logs;
                      for (double k : ks) {
                          const double dt = std::min(0.02, 0.15 / (0.9 * k));
                          const int nsteps = static_cast<int>(std::ceil(2.5 / dt));
                          const ModeTrajectory tr =
                              evolve_mode_k(W0, static_cast<int>(k), flow, 2.5, nsteps);
                          logs.push_back(std::log(tr.wnorms.back() / tr.wnorms.front()));
                      }
                      const LinearFit fit = linear_fit(ks, logs);
                      return {sup <= 1e-4 && fit.r2 >= 0.99,
                              fmt("manufactured sup err %.2e (<= 1e-4), growth R^2 = %.6f "
                                  "(>= 0.99)",
                                  sup, fit.r2)};
                  });

    run_criterion(8, "u-form and V-form growth exponents agree at k = 100", [&]() -> Outcome {
        std::vector<double> y(1201);
        std::vector<cplx> U0(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) {
            y[i] = 0.01 * i;
            U0[i] = cplx(y[i] * std::exp(-y[i] * y[i]), 0.0);
        }
        const ModeTrajectory tr = evolve_mode_k(U0, 100, flow, 1.5, 900);
        const double sigma_heat = growth_fit(tr.t, tr.wnorms, 1.0).slope;
        EvolveParams p;
        p.N = 2000;
        const EvolveResult res = evolve(100.0, flow, p);
        if (!res.estimate.converged) return {false, "estimator did not converge at k = 100"};
        const double sigma_prandtl = -std::imag(res.estimate.omega) * 100.0;
        const double rel = std::abs(sigma_heat - sigma_prandtl) / sigma_prandtl;
        return {rel <= 0.05, fmt("sigma_heat = %.5f, sigma_prandtl = %.5f, rel diff %.4f "
                                 "(<= 0.05)",
                                 sigma_heat, sigma_prandtl, rel)};
    });

    run_criterion(9, "quasimode sandwich and envelope constants across three decades",
                  [&]() -> Outcome {
                      if (layer == nullptr) return {false, "no layer profile available"};
                      const GaussianHeatFlow heat;
                      double u_lo = 1e300, u_hi = 0.0, e_lo = 1e300, e_hi = 0.0;
                      double sigma0 = 0.0;
                      for (double eps : {1e-3, 1e-4, 1e-5}) {
                          std::vector<double> ts(6);
                          for (int j = 0; j < 6; ++j) ts[j] = std::sqrt(eps) * j / 5.0;
                          const ResidualReport rep = residual(heat, *layer, eps, ts);
                          sigma0 = rep.sigma0;
                          for (double u : rep.u_ratio) {
                              u_lo = std::min(u_lo, u);
                              u_hi = std::max(u_hi, u);
                          }
                          for (double e : rep.envelope_ratio) {
                              e_lo = std::min(e_lo, e);
                              e_hi = std::max(e_hi, e);
                          }
                      }
                      const bool ok = u_hi / u_lo <= 2.0 && e_hi / e_lo <= 2.0 &&
                                      std::abs(sigma0 - 0.9247) <= 0.01;
                      return {ok, fmt("sandwich ratio %.3f (<= 2), envelope ratio %.3f (<= 2), "
                                      "sigma0 = %.4f (0.9247 +- 0.01)",
                                      u_hi / u_lo, e_hi / e_lo, sigma0)};
                  });

    run_criterion(10, "numerical integrity: RK4 order, CN linearity, determinism, decay",
                  [&]() -> Outcome {
                      // RK4 Richardson triple.
                      const cplx t2(0.0, -2.0);
                      const cplx x1 = integrate_backward(t2, 6.0, 1500).X.back();
                      const cplx x2 = integrate_backward(t2, 6.0, 3000).X.back();
                      const cplx x3 = integrate_backward(t2, 6.0, 6000).X.back();
                      const double ratio = std::abs(x1 - x2) / std::abs(x2 - x3);

                      // CN linearity on a fixed-seed batch.
                      const double w = std::pow(2e-4, 0.25) / std::pow(-flow.curvature, 0.25);
                      const StretchedGrid g = build_grid(600, 10.0, flow.a, w);
                      const BandedOperators ops = assemble(g, flow, 1e-4);
                      const CnStepper stepper(ops, 0.01);
                      double lin_dev = 0.0;
                      for (std::uint64_t seed : {3u, 9u, 18u}) {
                          std::mt19937_64 rng(seed);
                          std::uniform_real_distribution<double> unif(0.0, 1.0);
                          std::vector<cplx> u(g.y.size()), v(g.y.size()), uv(g.y.size());
                          for (std::size_t i = 0; i < u.size(); ++i) {
                              u[i] = cplx(unif(rng), unif(rng));
                              v[i] = cplx(unif(rng), unif(rng));
                          }
                          for (const auto& bc : ops.bc) u[bc.row] = v[bc.row] = cplx(0.0, 0.0);
                          for (std::size_t i = 0; i < u.size(); ++i) uv[i] = u[i] + v[i];
                          const auto su = stepper.step(u);
                          const auto sv = stepper.step(v);
                          const auto suv = stepper.step(uv);
                          double dev = 0.0, peak = 0.0;
                          for (std::size_t i = 0; i < u.size(); ++i) {
                              dev = std::max(dev, std::abs(suv[i] - (su[i] + sv[i])));
                              peak = std::max(peak, std::abs(suv[i]));
                          }
                          lin_dev = std::max(lin_dev, dev / peak);
                      }

                      // Sweep determinism.
                      SweepParams sp;
                      sp.nsteps = 1200;
                      sp.window = 400;
                      const auto rows1 = sweep_k({1e3}, flow, sp);
                      const auto rows2 = sweep_k({1e3}, flow, sp);
                      const double det = std::abs(rows1[0].omega - rows2[0].omega);

                      // Gaussian decay of the shooting solution.
                      std::vector<double> zs, as;
                      for (std::size_t i = 0; i < traj.z_nodes.size(); ++i)
                          if (traj.z_nodes[i] >= 2.0) {
                              zs.push_back(traj.z_nodes[i]);
                              as.push_back(std::abs(traj.X[i]));
                          }
                      const DecayFit fit = decay_rate(zs, as);

                      const bool ok = ratio >= 12.0 && ratio <= 20.0 && lin_dev <= 1e-12 &&
                                      det <= 1e-12 && fit.rate >= 0.2;
                      return {ok, fmt("RK4 ratio %.2f (in [12,20]), CN linearity %.2e "
                                      "(<= 1e-12), sweep |d omega| %.1e (<= 1e-12), decay rate "
                                      "%.3f (>= 0.2)",
                                      ratio, lin_dev, det, fit.rate)};
                  });

    if (g_failed == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criterion(s) failed\n", g_failed);
    return 1;
}
