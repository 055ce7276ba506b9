#include "mqreg/ali.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mqreg/influence.hpp"
#include "mqreg/normal.hpp"

namespace mqreg {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Gauss-Legendre nodes/weights on [-1, 1], computed once per order.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussRule make_gauss_rule(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return rule;
}

const GaussRule& gauss64() {
    static const GaussRule rule = make_gauss_rule(64);
    return rule;
}

// Integral over [a, b] of f with the cached 64-point rule.
template <typename F>
double gauss_integrate(F f, double a, double b) {
    const GaussRule& rule = gauss64();
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0.0;
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    }
    return half * sum;
}

void check_qc(double q, double c) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q must lie in (0,1)");
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("c must be positive and finite");
}

}  // namespace

void AliParams::validate() const {
    check_qc(q, c);
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
}

double b_q(double q, double c) {
    check_qc(q, c);
    double s = 1.0 - q;
    return std::sqrt(kPi / q) * (normal_cdf(c * std::sqrt(2.0 * q)) - 0.5) +
           std::sqrt(kPi / s) * (normal_cdf(c * std::sqrt(2.0 * s)) - 0.5) +
           std::exp(-c * c * q) / (2.0 * c * q) +
           std::exp(-c * c * s) / (2.0 * c * s);
}

double ali_log_pdf(double y, const AliParams& p) {
    p.validate();
    double u = (y - p.mu) / p.sigma;
    return -std::log(p.sigma) - std::log(b_q(p.q, p.c)) - rho_q(u, p.q, p.c);
}

double expected_psi_sq_ali(double q, double c) {
    check_qc(q, c);
    // One half-line at a time; the negative side is the positive side of the
    // mirrored order 1-q. On (0, c] the unnormalized integrand is
    // 4w^2 u^2 exp(-w u^2) with w the branch weight / 2; past c it is the
    // constant 4w^2c^2 against an exponential tail, integrable exactly.
    auto half_line = [c](double w) {
        double core = gauss_integrate(
            [w](double u) { return 4.0 * w * w * u * u * std::exp(-w * u * u); }, 0.0, c);
        double tail = 2.0 * w * c * std::exp(-w * c * c);
        return core + tail;
    };
    return (half_line(q) + half_line(1.0 - q)) / b_q(q, c);
}

double expected_psi_sq_normal(double c) {
    if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
    return 2.0 * normal_cdf(c) - 1.0 - 2.0 * c * normal_pdf(c) +
           2.0 * c * c * (1.0 - normal_cdf(c));
}

}  // namespace mqreg
