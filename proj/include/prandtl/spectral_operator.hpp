#pragma once

#include <utility>
#include <vector>

#include "prandtl/numerics.hpp"

namespace prandtl {

// Discretization of A u = u''/(z^2+1) + 6z u'/(z^2+1)^2 + 6 u/(z^2+1)^2 on
// [-Z, Z] with Dirichlet ends, in the inner product weighted by (z^2+1)^4.
// stiffness (tridiagonal, interior nodes) realizes the weighted bilinear form
//   u^T S v = -sum_m (z_m^2+1)^3 (Du)_m (Dv)_m h + 6 sum_i (z_i^2+1)^2 u_i v_i h,
// mass is the diagonal (z^2+1)^4 h, so S = M A_disc with A_disc the discrete A.
struct WeightedOperator {
    double Z = 0.0;
    int N = 0;                       // interval count (even)
    std::vector<double> z_nodes;     // N+1 uniform nodes
    std::vector<double> weight4;     // (z^2+1)^4 at nodes
    std::vector<double> diag, off;   // stiffness tridiagonal over interior nodes 1..N-1
    std::vector<double> mass;        // diagonal mass over interior nodes
};

WeightedOperator assemble(double Z, int N);

// Weighted quadratic form (A u | u).  Evaluates the energy discretization on
// the full grid and on the even-node subsample and Richardson-extrapolates the
// pair; still a quadratic form in u, accurate to O(h^4).
double quadratic_form(const WeightedOperator& op, const std::vector<double>& u);

// Un-extrapolated O(h^2) energy form (convergence studies).
double quadratic_form_raw(const WeightedOperator& op, const std::vector<double>& u);

// Largest eigenvalue of S u = alpha M u and its eigenvector (weighted-L2
// normalized, positive at the center).
std::pair<double, std::vector<double>> top_eigenvalue(const WeightedOperator& op);

// Step-2 rotation: tau = -sqrt(alpha/2) (1 + i).
cplx alpha_to_tau(double alpha);

}  // namespace prandtl
