#pragma once

#include <string>
#include <vector>

#include "prandtl/base_flow.hpp"
#include "prandtl/numerics.hpp"

namespace prandtl {

struct HeatModeState {
    int k = 0;
    double t = 0.0;
    std::vector<cplx> U;
    double alpha_w = 0.5;
};

struct ModeTrajectory {
    int k = 0;
    std::vector<double> t;
    std::vector<double> wnorms;
    std::vector<double> y;
    std::vector<cplx> U;  // final state
};

// Image-charge kernel S(t,y,z) = G(t,y-z) - G(t,y+z).
double kernel(double t, double y, double z);

// Composite Simpson weights on n intervals (n even), spacing h.
std::vector<double> simpson_quadrature_weights(std::size_t n, double h);

// Weighted sup norm sup_y e^{alpha y} |U|.
double weighted_norm(const std::vector<cplx>& U, const std::vector<double>& y,
                     double alpha_w = 0.5);
double weighted_norm(const std::vector<double>& U, const std::vector<double>& y,
                     double alpha_w = 0.5);

// Dense ny x nz kernel matrix with quadrature weights baked in (row-major);
// deriv = m differentiates S m times in y (m <= 3).
std::vector<double> kernel_matrix(double t, const std::vector<double>& y,
                                  const std::vector<double>& z,
                                  const std::vector<double>& wz, int deriv = 0);

// out = K * in for complex vectors (two real GEMVs).
std::vector<cplx> kernel_apply(const std::vector<double>& K, std::size_t ny, std::size_t nz,
                               const std::vector<cplx>& in);
std::vector<double> kernel_apply(const std::vector<double>& K, std::size_t ny, std::size_t nz,
                                 const std::vector<double>& in);

// Duhamel representation with F sampled on a uniform s-grid over [0, t]
// (F[j] is the slice at s_j on the z-grid).  The singular s -> t endpoint is
// handled by the substitution s = t - sigma^2.
std::vector<cplx> solve_duhamel(const std::vector<cplx>& U0, const std::vector<std::vector<cplx>>& F,
                                double t, const std::vector<double>& y,
                                const std::vector<double>& z, int nsigma = 64);

// Mode-k integral evolution: dU/dt - d2U/dy2 = ik (U_s' int_0^y U - U_s U),
// midpoint-Picard stepping of the Duhamel form.
ModeTrajectory evolve_mode_k(const std::vector<cplx>& U0, int k, const BaseFlow& flow,
                             double T, int nsteps, double Ly = 12.0, double hy = 0.01);

// Kernel application for the base flow (F = 0): values of u_s(t, .) on y.
std::vector<double> evolve_base_flow(const std::vector<double>& Us0, double t,
                                     const std::vector<double>& z, const std::vector<double>& y);

// Single-point differentiated-kernel quadrature d^m/dy^m u_s(t, y0).
double base_flow_deriv(int m, double t, double y0, const std::vector<double>& Us0,
                       const std::vector<double>& z, const std::vector<double>& wz);

// Closed-form heat evolution of U_s = 2 y e^{-y^2}:
//   u_s(t,y) = 2 s^{-3/2} y e^{-y^2/s}, s = 1 + 4t,
// with y-derivatives up to third order; exact critical point a = sqrt(s/2).
double us_heat(double t, double y);
double us_heat_dy(int m, double t, double y);  // m = 0..3
double critical_point_exact(double t);

// Least-squares exponential growth rate of a norm history over t >= t_min.
LinearFit growth_fit(const std::vector<double>& t, const std::vector<double>& wnorms,
                     double t_min);

void export_trajectory(const std::string& path, const ModeTrajectory& traj);

}  // namespace prandtl
