#pragma once

#include "mqreg/types.hpp"

namespace mqreg {

struct CovarianceEstimate {
    Eigen::MatrixXd cov;  // symmetric PSD
    Eigen::VectorXd se;   // sqrt of the diagonal
    double tau = 0.0;     // efficiency factor
};

// Plug-in efficiency factor [n^{-1} sum psi_q'(r_i)]^2 / [n^{-1} sum psi_q^2(r_i)]
// on residuals already standardized by the fitted scale. Throws
// DegenerateEfficiency when the denominator vanishes.
double tau_hat(const Eigen::VectorXd& std_residuals, double q, double c);

// Sandwich covariance sigma^2 A^{-1} B A^{-1} with
// A = sum psi_q'(r_i) x_i x_i^T and B = sum psi_q^2(r_i) x_i x_i^T.
CovarianceEstimate sandwich_cov(const Dataset& data, const MQFit& fit, double q, double c);

// tau-collapsed variant: (sigma^2 / (n * tau)) * (n^{-1} sum x_i x_i^T)^{-1}.
CovarianceEstimate tau_cov(const Dataset& data, const MQFit& fit, double q, double c);

}  // namespace mqreg
