#include "mqreg/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "mqreg/fit.hpp"
#include "mqreg/inference.hpp"
#include "mqreg/normal.hpp"
#include "mqreg/parallel.hpp"

namespace mqreg {

void CGrid::validate() const {
    if (!(lo >= 0.5 && lo < hi)) throw std::invalid_argument("CGrid: need 0.5 <= lo < hi");
    if (!(step > 0.0)) throw std::invalid_argument("CGrid: step must be positive");
}

std::vector<double> CGrid::values() const {
    validate();
    std::vector<double> out;
    int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
    out.reserve(count);
    for (int i = 0; i < count; ++i) out.push_back(lo + i * step);
    if (out.back() < hi - 1e-9) out.push_back(hi);
    return out;
}

std::vector<double> default_q_grid() {
    std::vector<double> grid;
    grid.reserve(99);
    for (int i = 1; i <= 99; ++i) grid.push_back(i / 100.0);
    return grid;
}

double partial_expectation_normal(double t, double mean, double sd) {
    if (!(sd > 0.0)) throw std::invalid_argument("partial_expectation_normal: sd must be positive");
    double z = (t - mean) / sd;
    return mean * normal_cdf(z) - sd * normal_pdf(z);
}

InverseMqResult inverse_mq(double x, double f_mean, double f_sd, double sigma_q, double c) {
    if (!(f_sd > 0.0)) throw std::invalid_argument("inverse_mq: f_sd must be positive");
    if (!(sigma_q > 0.0)) throw std::invalid_argument("inverse_mq: sigma_q must be positive");
    if (!(c > 0.0)) throw std::invalid_argument("inverse_mq: c must be positive");

    const double a_minus = x - c * sigma_q;
    const double a_plus = x + c * sigma_q;
    const double b_minus = x / sigma_q - c;
    const double b_plus = x / sigma_q + c;

    auto F = [&](double t) { return normal_cdf((t - f_mean) / f_sd); };
    auto H = [&](double t) { return partial_expectation_normal(t, f_mean, f_sd); };

    const double Hx = H(x), Fx = F(x);
    double num = b_minus * F(a_minus) + (Hx - H(a_minus) - x * Fx) / sigma_q;
    double den = (2.0 * Hx - H(a_minus) - H(a_plus) - 2.0 * x * Fx) / sigma_q +
                 b_minus * F(a_minus) + b_plus * F(a_plus) - c;

    InverseMqResult res;
    if (std::abs(den) < 1e-300) {
        res.value = x < f_mean ? 0.0 : 1.0;
        res.clamped = true;
        return res;
    }
    res.value = std::clamp(num / den, 0.0, 1.0);
    return res;
}

TuningResult select_c_av(const Dataset& data, double q, const CGrid& grid, int max_outer) {
    data.validate();
    const std::vector<double> cs = grid.values();

    TuningResult result;
    double c_cur = 1.3;  // modest start, avoids local maxima at extreme q
    std::optional<double> c_prev;

    for (int outer = 1; outer <= max_outer; ++outer) {
        result.iterations = outer;
        MQConfig cfg;
        cfg.q = q;
        cfg.c = c_cur;
        cfg.scale = ScaleMethod::cMAD;
        MQFit f = fit(data, cfg);
        Eigen::VectorXd r = f.residuals / f.sigma;

        result.trace.clear();
        double best_tau = -1.0;
        double best_c = cs.front();
        for (double c : cs) {
            double tau = tau_hat(r, q, c);
            result.trace.emplace_back(c, tau);
            if (tau > best_tau + 1e-15) {  // ties break toward the smaller c
                best_tau = tau;
                best_c = c;
            }
        }

        const double eps = 0.5 * grid.step;
        if (std::abs(best_c - c_cur) < eps) {
            result.c_opt = best_c;
            result.converged = true;
            return result;
        }
        if (c_prev && std::abs(best_c - *c_prev) < eps) {
            // Two-cycle between grid points: settle on the smaller one.
            result.c_opt = std::min(best_c, c_cur);
            result.converged = true;
            return result;
        }
        c_prev = c_cur;
        c_cur = best_c;
    }

    result.c_opt = c_cur;
    result.converged = false;
    return result;
}

TuningResult select_c_inv(const Dataset& data, const std::vector<double>& q_grid,
                          const CGrid& grid) {
    data.validate();
    if (q_grid.empty()) throw std::invalid_argument("select_c_inv: empty q grid");
    const std::vector<double> cs = grid.values();

    // Every c needs the q = 0.5 reference ensemble member.
    std::vector<double> qs = q_grid;
    bool has_half = std::any_of(qs.begin(), qs.end(),
                                [](double q) { return std::abs(q - 0.5) < 1e-12; });

    struct CellResult {
        double d = std::numeric_limits<double>::quiet_NaN();
        int failed_q = 0;
    };
    std::vector<CellResult> cells(cs.size());

    parallel_for(static_cast<int>(cs.size()), [&](int j) {
        const double c_j = cs[j];
        double med_half = 0.0;
        std::vector<double> med_q(qs.size(), std::numeric_limits<double>::quiet_NaN());
        std::vector<double> sigma_q(qs.size(), std::numeric_limits<double>::quiet_NaN());

        auto fit_at = [&](double q, double& med_out, double& sigma_out) {
            MQConfig cfg;
            cfg.q = q;
            cfg.c = c_j;
            cfg.scale = ScaleMethod::cMAD;
            MQFit f = fit(data, cfg);
            med_out = median(predict(f, data.X));
            sigma_out = f.sigma;
        };

        int failed = 0;
        for (size_t k = 0; k < qs.size(); ++k) {
            try {
                fit_at(qs[k], med_q[k], sigma_q[k]);
            } catch (const std::exception&) {
                ++failed;
            }
        }
        if (has_half) {
            for (size_t k = 0; k < qs.size(); ++k) {
                if (std::abs(qs[k] - 0.5) < 1e-12) med_half = med_q[k];
            }
        } else {
            double s_half;
            fit_at(0.5, med_half, s_half);
        }
        if (std::isnan(med_half)) {
            cells[j].failed_q = static_cast<int>(qs.size());
            return;
        }

        double d = 0.0;
        for (size_t k = 0; k < qs.size(); ++k) {
            if (std::isnan(med_q[k])) continue;
            // Standardized shift mapped through the c = 4 reference model.
            double shift = (med_q[k] - med_half) / sigma_q[k];
            double q_plus = inverse_mq(shift, 0.0, 1.0, 1.0, 4.0).value;
            double dev = q_plus - qs[k];
            d += dev * dev;
        }
        cells[j].d = d;
        cells[j].failed_q = failed;
    });

    TuningResult result;
    result.iterations = 1;
    double best_d = std::numeric_limits<double>::infinity();
    int total_failed = 0;
    for (size_t j = 0; j < cs.size(); ++j) {
        total_failed += cells[j].failed_q;
        if (std::isnan(cells[j].d)) continue;
        result.trace.emplace_back(cs[j], cells[j].d);
        if (cells[j].d < best_d - 1e-15) {
            best_d = cells[j].d;
            result.c_opt = cs[j];
        }
    }
    if (result.trace.empty()) {
        throw DegenerateScale("select_c_inv: the ensemble failed at every grid point");
    }
    result.converged = true;
    result.failed_fits = total_failed;
    return result;
}

}  // namespace mqreg
