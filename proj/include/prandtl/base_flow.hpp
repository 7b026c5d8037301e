#pragma once

#include <cmath>

namespace prandtl {

// Shear profile with analytic derivatives and its nondegenerate critical
// point.  Default flow: U_s(y) = 2 y e^{-y^2}, a = 1/sqrt(2),
// U_s''(a) = -4 sqrt(2) e^{-1/2}.
struct BaseFlow {
    double a = 0.0;          // critical point of U_s
    double curvature = 0.0;  // U_s''(a) < 0

    double Us(double y) const { return 2.0 * y * std::exp(-y * y); }
    double Us1(double y) const { return 2.0 * std::exp(-y * y) * (1.0 - 2.0 * y * y); }
    double Us2(double y) const { return 4.0 * y * std::exp(-y * y) * (2.0 * y * y - 3.0); }
    double Us3(double y) const {
        return std::exp(-y * y) * (-16.0 * y * y * y * y + 48.0 * y * y - 12.0);
    }
};

inline BaseFlow gaussian_shear_flow() {
    BaseFlow flow;
    flow.a = 1.0 / std::sqrt(2.0);
    flow.curvature = -4.0 * std::sqrt(2.0) * std::exp(-0.5);
    return flow;
}

}  // namespace prandtl
