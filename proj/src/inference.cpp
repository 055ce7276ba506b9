#include "mqreg/inference.hpp"

#include <cmath>

#include "mqreg/influence.hpp"

namespace mqreg {

double tau_hat(const Eigen::VectorXd& std_residuals, double q, double c) {
    const auto n = std_residuals.size();
    if (n == 0) throw std::invalid_argument("tau_hat: empty residual vector");
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        num += dpsi_q(std_residuals[i], q, c);
        double v = psi_q(std_residuals[i], q, c);
        den += v * v;
    }
    num /= static_cast<double>(n);
    den /= static_cast<double>(n);
    if (den <= 0.0) throw DegenerateEfficiency("tau_hat: all residuals are zero");
    return num * num / den;
}

namespace {

CovarianceEstimate finish(Eigen::MatrixXd cov, double tau) {
    cov = 0.5 * (cov + cov.transpose()).eval();
    CovarianceEstimate est;
    est.se = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    est.cov = std::move(cov);
    est.tau = tau;
    return est;
}

}  // namespace

CovarianceEstimate sandwich_cov(const Dataset& data, const MQFit& fit, double q, double c) {
    const auto n = data.X.rows();
    const auto p = data.X.cols();
    Eigen::VectorXd r = fit.residuals / fit.sigma;

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(p, p);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::VectorXd xi = data.X.row(i).transpose();
        double v = psi_q(r[i], q, c);
        A.noalias() += dpsi_q(r[i], q, c) * xi * xi.transpose();
        B.noalias() += (v * v) * xi * xi.transpose();
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible()) throw SingularDesign("sandwich_cov: bread matrix is singular");
    Eigen::MatrixXd Ainv = lu.inverse();
    Eigen::MatrixXd cov = fit.sigma * fit.sigma * Ainv * B * Ainv;
    return finish(std::move(cov), tau_hat(r, q, c));
}

CovarianceEstimate tau_cov(const Dataset& data, const MQFit& fit, double q, double c) {
    const auto n = data.X.rows();
    Eigen::VectorXd r = fit.residuals / fit.sigma;
    double tau = tau_hat(r, q, c);
    if (tau <= 0.0) throw DegenerateEfficiency("tau_cov: zero efficiency factor");

    Eigen::MatrixXd gram = data.X.transpose() * data.X / static_cast<double>(n);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
    if (!lu.isInvertible()) throw SingularDesign("tau_cov: Gram matrix is singular");
    Eigen::MatrixXd cov =
        (fit.sigma * fit.sigma / (static_cast<double>(n) * tau)) * lu.inverse();
    return finish(std::move(cov), tau);
}

}  // namespace mqreg
