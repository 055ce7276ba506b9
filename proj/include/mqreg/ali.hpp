#pragma once

// Asymmetric least informative (ALI) distribution: normalizing constant,
// log-density, and the psi^2 moments used by the MM and Proposal-2 scale
// updates.

namespace mqreg {

struct AliParams {
    double mu = 0.0;
    double sigma = 1.0;  // > 0
    double q = 0.5;      // in (0,1)
    double c = 1.345;    // > 0

    void validate() const;
};

// Normalizing constant B_q = integral of exp(-rho_q(u)) over the real line,
// in closed form. Symmetric under q <-> 1-q.
double b_q(double q, double c);

// log f(y) = -log(sigma) - log(B_q) - rho_q((y - mu)/sigma).
double ali_log_pdf(double y, const AliParams& p);

// E{psi_q^2(u)} for u ~ ALI(0, 1, q, c). Gauss-Legendre on the quadratic
// core plus exact exponential-tail integrals.
double expected_psi_sq_ali(double q, double c);

// E{psi_c^2(u)} for u ~ N(0,1): 2*Phi(c) - 1 - 2*c*phi(c) + 2*c^2*(1 - Phi(c)).
double expected_psi_sq_normal(double c);

}  // namespace mqreg
