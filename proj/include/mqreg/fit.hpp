#pragma once

#include "mqreg/types.hpp"

namespace mqreg {

// Midpoint-average median of a copy of the input.
double median(Eigen::VectorXd v);

// med|r| / Phi^{-1}(3/4). Throws DegenerateScale on a zero result.
double scale_nmad(const Eigen::VectorXd& residuals);

// med|r - med(r)| / Phi^{-1}(3/4). Throws DegenerateScale on a zero result.
double scale_cmad(const Eigen::VectorXd& residuals);

// One fixed-point step of the likelihood scale equation
// sigma_new^2 = n^{-1} sum psi_q(r_i) * eps_i * sigma_prev, r_i = eps_i/sigma_prev.
double scale_ml_step(const Eigen::VectorXd& residuals, double sigma_prev, double q, double c);

// One fixed-point step of the moment scale equation
// sigma_new^2 = sum psi_q^2(r_i) * sigma_prev^2 / ((n - p) * E{psi_q^2}),
// with the expectation taken under ALI(0,1,q,c).
double scale_mm_step(const Eigen::VectorXd& residuals, double sigma_prev, double q, double c,
                     int p);

// Weighted least squares via QR of the weight-scaled design.
// Throws SingularDesign if the design is rank deficient.
Eigen::VectorXd wls_solve(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          const Eigen::VectorXd& weights);

// IRLS solver for the M-quantile estimating equations with the scale
// estimator updated inside the iteration. Deterministic given inputs.
// NoConvergence is reported through MQFit::converged, not thrown.
MQFit fit(const Dataset& data, const MQConfig& cfg);

Eigen::VectorXd predict(const MQFit& fit, const Eigen::MatrixXd& X_new);

}  // namespace mqreg
