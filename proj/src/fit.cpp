#include "mqreg/fit.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mqreg/ali.hpp"
#include "mqreg/influence.hpp"
#include "mqreg/normal.hpp"

namespace mqreg {

void Dataset::validate() const {
    const auto n = X.rows();
    const auto p = X.cols();
    if (y.size() != n) throw DimensionMismatch("Dataset: y and X row counts differ");
    if (n < p || p < 1) throw DimensionMismatch("Dataset: need n >= p >= 1");
    if (!y.allFinite() || !X.allFinite()) {
        throw std::invalid_argument("Dataset: non-finite entries");
    }
}

std::string to_string(ScaleMethod m) {
    switch (m) {
        case ScaleMethod::nMAD: return "nMAD";
        case ScaleMethod::cMAD: return "cMAD";
        case ScaleMethod::ML: return "ML";
        case ScaleMethod::MM: return "MM";
    }
    return "?";
}

ScaleMethod scale_method_from_string(const std::string& name) {
    std::string s;
    for (char ch : name) s.push_back(static_cast<char>(std::tolower(ch)));
    if (s == "nmad") return ScaleMethod::nMAD;
    if (s == "cmad") return ScaleMethod::cMAD;
    if (s == "ml") return ScaleMethod::ML;
    if (s == "mm") return ScaleMethod::MM;
    throw std::invalid_argument("unknown scale method: " + name);
}

void MQConfig::validate() const {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("MQConfig: q must lie in (0,1)");
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("MQConfig: c must be positive");
    if (max_iter < 1) throw std::invalid_argument("MQConfig: max_iter must be >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("MQConfig: tol must be positive");
}

double median(Eigen::VectorXd v) {
    const auto n = v.size();
    if (n == 0) throw std::invalid_argument("median of empty vector");
    double* b = v.data();
    double* e = b + n;
    double* mid = b + n / 2;
    std::nth_element(b, mid, e);
    double hi = *mid;
    if (n % 2 == 1) return hi;
    double lo = *std::max_element(b, mid);
    return 0.5 * (lo + hi);
}

double scale_nmad(const Eigen::VectorXd& residuals) {
    double s = median(residuals.cwiseAbs()) / kMadConsistency;
    if (s <= 0.0) throw DegenerateScale("nMAD scale is zero");
    return s;
}

double scale_cmad(const Eigen::VectorXd& residuals) {
    double m = median(residuals);
    double s = median((residuals.array() - m).abs().matrix()) / kMadConsistency;
    if (s <= 0.0) throw DegenerateScale("cMAD scale is zero");
    return s;
}

double scale_ml_step(const Eigen::VectorXd& residuals, double sigma_prev, double q, double c) {
    const auto n = residuals.size();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        acc += psi_q(residuals[i] / sigma_prev, q, c) * residuals[i];
    }
    double s2 = acc * sigma_prev / static_cast<double>(n);
    if (s2 <= 0.0) throw DegenerateScale("ML scale update is zero");
    return std::sqrt(s2);
}

double scale_mm_step(const Eigen::VectorXd& residuals, double sigma_prev, double q, double c,
                     int p) {
    const auto n = residuals.size();
    if (n <= p) throw std::invalid_argument("scale_mm_step: need n > p");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double v = psi_q(residuals[i] / sigma_prev, q, c);
        acc += v * v;
    }
    double s2 = acc * sigma_prev * sigma_prev /
                (static_cast<double>(n - p) * expected_psi_sq_ali(q, c));
    if (s2 <= 0.0) throw DegenerateScale("MM scale update is zero");
    return std::sqrt(s2);
}

Eigen::VectorXd wls_solve(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          const Eigen::VectorXd& weights) {
    if (weights.size() != X.rows() || y.size() != X.rows()) {
        throw DimensionMismatch("wls_solve: row counts differ");
    }
    Eigen::VectorXd sw = weights.cwiseSqrt();
    Eigen::MatrixXd Xw = sw.asDiagonal() * X;
    Eigen::VectorXd yw = sw.cwiseProduct(y);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xw);
    if (qr.rank() < X.cols()) throw SingularDesign("design matrix is rank deficient");
    return qr.solve(yw);
}

namespace {

struct ScaleUpdater {
    ScaleMethod method;
    double q, c;
    int p;
    double e_psi_sq = 0.0;  // cached ALI moment, MM only

    double step(const Eigen::VectorXd& resid, double sigma_prev) const {
        switch (method) {
            case ScaleMethod::nMAD: return scale_nmad(resid);
            case ScaleMethod::cMAD: return scale_cmad(resid);
            case ScaleMethod::ML: return scale_ml_step(resid, sigma_prev, q, c);
            case ScaleMethod::MM: {
                const auto n = resid.size();
                double acc = 0.0;
                for (Eigen::Index i = 0; i < n; ++i) {
                    double v = psi_q(resid[i] / sigma_prev, q, c);
                    acc += v * v;
                }
                double s2 = acc * sigma_prev * sigma_prev /
                            (static_cast<double>(n - p) * e_psi_sq);
                if (s2 <= 0.0) throw DegenerateScale("MM scale update is zero");
                return std::sqrt(s2);
            }
        }
        throw std::logic_error("unreachable");
    }
};

}  // namespace

MQFit fit(const Dataset& data, const MQConfig& cfg) {
    data.validate();
    cfg.validate();
    const auto n = data.X.rows();
    const auto p = data.X.cols();
    if ((cfg.scale == ScaleMethod::MM) && n <= p) {
        throw std::invalid_argument("MM scale requires n > p");
    }

    ScaleUpdater updater{cfg.scale, cfg.q, cfg.c, static_cast<int>(p)};
    if (cfg.scale == ScaleMethod::MM) updater.e_psi_sq = expected_psi_sq_ali(cfg.q, cfg.c);

    // Scale floor relative to the response spread; hitting it twice aborts.
    double y_spread = 1.0;
    try {
        y_spread = scale_cmad(data.y);
    } catch (const DegenerateScale&) {
        y_spread = 1.0;
    }
    const double sigma_floor = 1e-12 * std::max(y_spread, 1.0);

    // Unweighted least squares start, cMAD scale of its residuals.
    Eigen::VectorXd beta = wls_solve(data.X, data.y, Eigen::VectorXd::Ones(n));
    Eigen::VectorXd resid = data.y - data.X * beta;
    double sigma;
    try {
        sigma = scale_cmad(resid);
    } catch (const DegenerateScale&) {
        sigma = sigma_floor;
    }

    MQFit result;
    int floor_hits = sigma <= sigma_floor ? 1 : 0;
    bool converged = false;
    int it = 0;
    Eigen::VectorXd weights(n);
    for (it = 1; it <= cfg.max_iter; ++it) {
        for (Eigen::Index i = 0; i < n; ++i) {
            weights[i] = irls_weight(resid[i] / sigma, cfg.q, cfg.c);
        }
        Eigen::VectorXd beta_new = wls_solve(data.X, data.y, weights);
        resid = data.y - data.X * beta_new;

        double sigma_new;
        try {
            sigma_new = updater.step(resid, sigma);
        } catch (const DegenerateScale&) {
            sigma_new = sigma_floor;
        }
        if (sigma_new <= sigma_floor) {
            sigma_new = sigma_floor;
            if (++floor_hits >= 2) {
                throw DegenerateScale("scale update collapsed to zero (" +
                                      to_string(cfg.scale) + ", q=" + std::to_string(cfg.q) + ")");
            }
        }

        double dbeta = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            double denom = std::max(std::abs(beta[j]), 1e-10);
            dbeta = std::max(dbeta, std::abs(beta_new[j] - beta[j]) / denom);
        }
        double dsigma = std::abs(sigma_new - sigma) / sigma;

        beta = beta_new;
        sigma = sigma_new;
        if (std::max(dbeta, dsigma) < cfg.tol) {
            converged = true;
            break;
        }
    }

    result.beta = beta;
    result.sigma = sigma;
    result.residuals = resid;
    result.converged = converged;
    result.n_iter = std::min(it, cfg.max_iter);
    return result;
}

Eigen::VectorXd predict(const MQFit& fit, const Eigen::MatrixXd& X_new) {
    if (X_new.cols() != fit.beta.size()) {
        throw DimensionMismatch("predict: column count does not match coefficients");
    }
    return X_new * fit.beta;
}

}  // namespace mqreg
