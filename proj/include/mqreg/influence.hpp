#pragma once

#include <algorithm>
#include <cmath>

// Huber and M-quantile loss/influence functions and the IRLS weight derived
// from them. All functions are pure and safe to call concurrently.

namespace mqreg {

// Huber influence: identity inside [-c, c], clipped at c outside.
inline double psi_huber(double u, double c) {
    if (u > c) return c;
    if (u < -c) return -c;
    return u;
}

// Derivative of psi_huber. The boundary |u| == c counts as inside.
inline double dpsi_huber(double u, double c) {
    return std::abs(u) <= c ? 1.0 : 0.0;
}

// Huber loss: u^2/2 inside the threshold, linear continuation outside.
inline double rho_huber(double u, double c) {
    double au = std::abs(u);
    return au <= c ? 0.5 * u * u : c * au - 0.5 * c * c;
}

// Asymmetric weight applied to the negative/positive branch.
inline double branch_weight(double u, double q) {
    return u <= 0.0 ? 2.0 * (1.0 - q) : 2.0 * q;
}

// M-quantile loss rho_q(u) = branch_weight(u, q) * rho_huber(u, c).
inline double rho_q(double u, double q, double c) {
    return branch_weight(u, q) * rho_huber(u, c);
}

// M-quantile influence, the derivative of rho_q. Monotone non-decreasing,
// bounded by 2*max(q, 1-q)*c.
inline double psi_q(double u, double q, double c) {
    return branch_weight(u, q) * psi_huber(u, c);
}

// Derivative of psi_q: 2(1-q) on [-c, 0], 2q on (0, c], zero outside.
inline double dpsi_q(double u, double q, double c) {
    return branch_weight(u, q) * dpsi_huber(u, c);
}

// IRLS weight psi_q(u)/u. At u == 0 the u <= 0 branch factor 2(1-q) is used;
// the limit from either side differs but the estimating equation does not.
inline double irls_weight(double u, double q, double c) {
    if (u == 0.0) return 2.0 * (1.0 - q);
    return psi_q(u, q, c) / u;
}

}  // namespace mqreg
