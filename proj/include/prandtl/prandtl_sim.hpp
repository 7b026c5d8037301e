#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "prandtl/base_flow.hpp"
#include "prandtl/numerics.hpp"

namespace prandtl {

// Nonuniform grid on [0, L] clustering nodes at the shear layer: node density
// 1 + beta exp(-((y-a)/sg)^2/2) with sg = span*width/2.5 and beta chosen so a
// fraction `frac` of the nodes lies inside |y-a| <= span*width.  Nodes invert
// the analytic cumulative map (erf) by bisection.
struct StretchedGrid {
    std::vector<double> y;  // N+1 nodes, y[0] = 0, y[N] = L, strictly increasing
    double L = 0.0;
    double a = 0.0;
    double width = 0.0;  // target layer width (2 eps)^{1/4} |U''(a)|^{-1/4}
    double beta = 0.0;   // clustering amplitude actually used
};

StretchedGrid build_grid(int N, double L, double a, double width,
                         double frac = 0.35, double span = 10.0);

// Pentadiagonal operator stored as five diagonals, offsets -2..2;
// entry (i, i+o) lives in diag[o+2][i].
struct PentaDiag {
    std::array<std::vector<cplx>, 5> diag;
    int n = 0;  // matrix dimension

    void resize(int dim);
    std::vector<cplx> matvec(const std::vector<cplx>& x) const;
};

// Boundary-condition row: one-sided Fornberg stencil starting at column col0.
struct BcRow {
    int row = 0;
    int col0 = 0;
    std::vector<double> w;
};

// Discretization of M dV/dtheta = A' V with M = d2/dy2 and
// A' = -i diag(U_s) d2 + i diag(U''_s) + eps d4 - i omega_shift M
// on interior rows 3..N-2; rows {0,1,2,N-1,N} carry the boundary conditions
// V(0) = V'(0) = V'''(0) = 0, V'(L) = V''(L) = 0.  The real shift
// omega_shift rotates the frame so the estimator resolves the O(sqrt(eps))
// correction; it is added back by the estimator.
struct BandedOperators {
    int N = 0;  // highest node index
    double epsilon = 0.0;
    double omega_shift = 0.0;
    PentaDiag M;
    PentaDiag A;  // already shifted
    std::vector<BcRow> bc;
};

BandedOperators assemble(const StretchedGrid& grid, const BaseFlow& flow,
                         double epsilon, double omega_shift = 0.0);

// One Crank-Nicolson step: (M - dtheta/2 A') V^{n+1} = (M + dtheta/2 A') V^n,
// boundary rows replaced by the stencil equations (LHS) and zero (RHS).
// The banded LHS is LU-factored once (LAPACK zgbtrf) and reused per step.
class CnStepper {
  public:
    CnStepper(const BandedOperators& ops, double dtheta);

    std::vector<cplx> step(const std::vector<cplx>& V) const;
    double dtheta() const { return dtheta_; }

  private:
    double dtheta_;
    int n_;
    PentaDiag rhs_;
    std::vector<cplx> ab_;       // LAPACK banded storage, factored
    std::vector<int> ipiv_;
};

struct OmegaEstimate {
    cplx omega;            // lab frame (shift added back)
    double spread_y = 0.0;       // RMS deviation of the pointwise estimator
    double spread_theta = 0.0;   // drift of the median over the window
    std::pair<double, double> window{0.0, 0.0};  // theta range used
    bool converged = false;
};

struct EvolveParams {
    int N = 4000;
    double L = 10.0;
    int nsteps = 3600;
    int steps_per_efold = 200;
    int window = 800;  // estimator window (final steps)
    std::uint64_t seed = 12345;
    double spread_rel_tol = 0.05;  // relative to |omega - omega_shift|
    const std::vector<cplx>* initial = nullptr;  // optional initial data
};

struct EvolveResult {
    double k = 0.0;
    double epsilon = 0.0;
    double dtheta = 0.0;
    StretchedGrid grid;
    std::vector<cplx> V;  // final state, unit max modulus
    OmegaEstimate estimate;
    double log_amp = 0.0;      // accumulated log of the per-step rescalings
    double window_rate = 0.0;  // d(log amplitude)/d(theta) over the window
    double wall_seconds = 0.0;
};

// Crank-Nicolson power iteration at k = 1/eps with random initial data
// (complex uniform on the unit square per node, constrained nodes zeroed,
// mt19937_64 seeded for bit reproducibility).  dtheta resolves the expected
// growth |Im omega| ~ 0.9247 sqrt(eps) with `steps_per_efold` steps per
// e-fold.
EvolveResult evolve(double k, const BaseFlow& flow, const EvolveParams& params);

// Far-field normalized eigenmode: the mean over the last 10% of nodes is
// scaled to exactly 1 (fixes the arbitrary phase; theory legs share the
// convention).
struct ExtractedMode {
    std::vector<double> y;
    std::vector<cplx> v;
    cplx far_raw;  // mean far-field value before normalization
};

ExtractedMode extract_mode(const EvolveResult& result);

struct SweepRow {
    double k = 0.0;
    int n_nodes = 0;
    double dtheta = 0.0;
    cplx omega;
    cplx rescaled;  // (omega + U_s(a)) * sqrt(k)
    double spread_y = 0.0;
    double spread_theta = 0.0;
    double wall_seconds = 0.0;
    bool ok = false;         // evolve ran to completion
    bool converged = false;  // estimator spread criteria met
    std::string error;
};

struct SweepParams {
    double L = 10.0;
    int nsteps = 3600;
    int steps_per_efold = 200;
    int window = 800;
    std::uint64_t base_seed = 12345;
    int threads = 4;
};

// Default resolution policy: N = 2500 at k = 1e3 growing by 500 per decade,
// clamped to [2500, 4000].
int default_node_count(double k);

// Runs evolve for each k concurrently (per-k seed = base_seed XOR k); per-k
// failures are recorded in the row, not thrown.
std::vector<SweepRow> sweep_k(const std::vector<double>& ks, const BaseFlow& flow,
                              const SweepParams& params);

void export_sweep(const std::string& path, const std::vector<SweepRow>& rows);
void export_mode(const std::string& path, const ExtractedMode& mode);

}  // namespace prandtl
