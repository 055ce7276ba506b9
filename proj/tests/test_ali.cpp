#include <doctest.h>

#include <cmath>
#include <vector>

#include "mqreg/ali.hpp"
#include "mqreg/influence.hpp"
#include "mqreg/normal.hpp"
#include "oracles.hpp"

using namespace mqreg;

namespace {

const std::vector<double> kQGrid = {0.1, 0.25, 0.5, 0.75, 0.9};
const std::vector<double> kCGrid = {0.5, 1.3, 3.0};

// Integration breakpoints covering the density support to ~1e-22 mass.
std::vector<double> ali_breakpoints(double q, double c) {
    double up = c + 52.0 / (2.0 * q * c);
    double lo = -(c + 52.0 / (2.0 * (1.0 - q) * c));
    return {lo, -c, 0.0, c, up};
}

}  // namespace

TEST_CASE("b_q closed form vs quadrature of exp(-rho_q)") {
    CHECK(b_q(0.5, 1.345) == doctest::Approx(2.6607).epsilon(2e-4));
    for (double q : kQGrid) {
        for (double c : kCGrid) {
            double numeric = oracles::integrate_piecewise(
                [&](double u) { return std::exp(-rho_q(u, q, c)); }, ali_breakpoints(q, c));
            CHECK(std::abs(b_q(q, c) - numeric) < 1e-8);
        }
    }
}

TEST_CASE("b_q symmetric specialization at q = 0.5") {
    for (double c : kCGrid) {
        double expected = 2.0 * std::sqrt(2.0 * 3.14159265358979323846) * (normal_cdf(c) - 0.5) +
                          (2.0 / c) * std::exp(-0.5 * c * c);
        CHECK(b_q(0.5, c) == doctest::Approx(expected).epsilon(1e-13));
    }
}

TEST_CASE("b_q mirror symmetry in q") {
    for (double q : {0.05, 0.2, 0.35, 0.45}) {
        for (double c : kCGrid) {
            CHECK(b_q(q, c) == doctest::Approx(b_q(1.0 - q, c)).epsilon(1e-14));
        }
    }
}

TEST_CASE("density normalizes to one on the (q,c) grid") {
    for (double q : kQGrid) {
        for (double c : kCGrid) {
            AliParams p{0.0, 1.0, q, c};
            double mass = oracles::integrate_piecewise(
                [&](double y) { return std::exp(ali_log_pdf(y, p)); }, ali_breakpoints(q, c));
            CHECK(std::abs(mass - 1.0) < 1e-8);
        }
    }
}

TEST_CASE("log_pdf standardization and mode value") {
    AliParams p{2.5, 1.7, 0.3, 1.1};
    CHECK(ali_log_pdf(2.5, p) ==
          doctest::Approx(-std::log(1.7) - std::log(b_q(0.3, 1.1))).epsilon(1e-14));
    AliParams std_p{0.0, 1.0, 0.3, 1.1};
    for (double y : {-1.0, 0.4, 3.0, 7.7}) {
        CHECK(ali_log_pdf(y, p) ==
              doctest::Approx(ali_log_pdf((y - p.mu) / p.sigma, std_p) - std::log(p.sigma))
                  .epsilon(1e-12));
    }
}

TEST_CASE("expected_psi_sq_normal closed form") {
    CHECK(expected_psi_sq_normal(1.345) == doctest::Approx(0.7102).epsilon(2e-4));
    CHECK(expected_psi_sq_normal(8.0) == doctest::Approx(1.0).epsilon(1e-8));
    double v = expected_psi_sq_normal(0.5);
    CHECK(v > 0.0);
    CHECK(v <= 0.25);

    // Monte-Carlo oracle.
    oracles::Lcg rng(42);
    const int n = 1000000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        double z = normal_quantile(rng.uniform());
        double v2 = psi_huber(z, 1.345);
        v2 *= v2;
        sum += v2;
        sumsq += v2 * v2;
    }
    double mc = sum / n;
    double se = std::sqrt((sumsq / n - mc * mc) / n);
    CHECK(std::abs(expected_psi_sq_normal(1.345) - mc) < 3.0 * se);
}

TEST_CASE("expected_psi_sq_ali: symmetry, bound and Monte-Carlo oracle") {
    for (double q : {0.1, 0.3, 0.5}) {
        for (double c : kCGrid) {
            double v = expected_psi_sq_ali(q, c);
            CHECK(v > 0.0);
            double bound = 2.0 * std::max(q, 1.0 - q) * c;
            CHECK(v < bound * bound);
            CHECK(v == doctest::Approx(expected_psi_sq_ali(1.0 - q, c)).epsilon(1e-12));
        }
    }

    const double q = 0.5, c = 1.345;
    auto bp = ali_breakpoints(q, c);
    oracles::TabulatedSampler sampler([&](double u) { return std::exp(-rho_q(u, q, c)); },
                                      bp.front(), bp.back(), 400001);
    oracles::Lcg rng(7);
    const int n = 1000000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        double u = sampler.sample(rng.uniform());
        double v = psi_q(u, q, c);
        v *= v;
        sum += v;
        sumsq += v * v;
    }
    double mc = sum / n;
    double se = std::sqrt((sumsq / n - mc * mc) / n);
    CHECK(std::abs(expected_psi_sq_ali(q, c) - mc) < 3.0 * se);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS(b_q(0.0, 1.0));
    CHECK_THROWS(b_q(0.5, -1.0));
    CHECK_THROWS(expected_psi_sq_normal(0.0));
    AliParams bad{0.0, -1.0, 0.5, 1.0};
    CHECK_THROWS(ali_log_pdf(0.0, bad));
}
